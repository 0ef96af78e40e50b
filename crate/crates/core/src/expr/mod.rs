//! Expression trees for coordinate component functions.
//!
//! An [`Expr`] is an immutable, reference-counted tree. Construction goes
//! through simplifying constructors (constant folding, absorption of 0 and 1,
//! cancellation of structurally equal operands) so that lifted objects print
//! compactly. Identity checks never rely on simplification; they evaluate.
//!
//! Besides the symbolic node kinds, a [`Call`] node applies a [`Procedural`]
//! function to argument expressions. Procedural functions provide a value and
//! an analytic gradient; second partials are taken by central differences of
//! the gradient and anything beyond that is an evaluation error.

mod diff;
mod eval;
mod normal;
mod parse;
mod print;

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_rational::Rational64;

use crate::error::EvalError;
use crate::space::Coord;

pub use eval::{EvalCtx, FD_STEP, SINGULAR_GUARD};
pub use parse::parse_expr;

/// Elementary functions admitted by the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> Result<f64, EvalError> {
        match self {
            Func::Sin => Ok(x.sin()),
            Func::Cos => Ok(x.cos()),
            Func::Exp => Ok(x.exp()),
            Func::Log if x <= 0.0 => Err(EvalError::Domain("log of a non-positive value")),
            Func::Log => Ok(x.ln()),
            Func::Sqrt if x < 0.0 => Err(EvalError::Domain("sqrt of a negative value")),
            Func::Sqrt => Ok(x.sqrt()),
        }
    }
}

/// A function known only through code: value and analytic gradient with
/// respect to its arguments.
pub trait Procedural: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn arity(&self) -> usize;
    fn value(&self, x: &[f64]) -> Result<f64, EvalError>;
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, EvalError>;
}

/// Application of a procedural function, optionally differentiated with
/// respect to some of its arguments (`partials` is sorted).
#[derive(Clone, Debug)]
pub struct Call {
    pub func: Arc<dyn Procedural>,
    pub args: Vec<Expr>,
    pub partials: Vec<usize>,
}

impl Call {
    fn same_func(&self, other: &Call) -> bool {
        std::ptr::addr_eq(Arc::as_ptr(&self.func), Arc::as_ptr(&other.func))
    }
}

#[derive(Clone, Debug)]
pub enum Kind {
    Const(f64),
    Var(Coord),
    Neg(Expr),
    Func(Func, Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, Rational64),
    Call(Call),
}

#[derive(Debug)]
struct Node {
    kind: Kind,
    hash: u64,
}

#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

fn structural_hash(kind: &Kind) -> u64 {
    let mut h = DefaultHasher::new();
    match kind {
        Kind::Const(c) => (0u8, c.to_bits()).hash(&mut h),
        Kind::Var(v) => (1u8, v).hash(&mut h),
        Kind::Neg(a) => (2u8, a.0.hash).hash(&mut h),
        Kind::Func(f, a) => (3u8, f, a.0.hash).hash(&mut h),
        Kind::Add(a, b) => (4u8, a.0.hash, b.0.hash).hash(&mut h),
        Kind::Sub(a, b) => (5u8, a.0.hash, b.0.hash).hash(&mut h),
        Kind::Mul(a, b) => (6u8, a.0.hash, b.0.hash).hash(&mut h),
        Kind::Div(a, b) => (7u8, a.0.hash, b.0.hash).hash(&mut h),
        Kind::Pow(a, r) => (8u8, a.0.hash, *r.numer(), *r.denom()).hash(&mut h),
        Kind::Call(c) => {
            9u8.hash(&mut h);
            (Arc::as_ptr(&c.func) as *const () as usize).hash(&mut h);
            for a in &c.args {
                a.0.hash.hash(&mut h);
            }
            c.partials.hash(&mut h);
        }
    }
    h.finish()
}

impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.hash != other.0.hash {
            return false;
        }
        match (&self.0.kind, &other.0.kind) {
            (Kind::Const(a), Kind::Const(b)) => a == b,
            (Kind::Var(a), Kind::Var(b)) => a == b,
            (Kind::Neg(a), Kind::Neg(b)) => a == b,
            (Kind::Func(f, a), Kind::Func(g, b)) => f == g && a == b,
            (Kind::Add(a, b), Kind::Add(c, d))
            | (Kind::Sub(a, b), Kind::Sub(c, d))
            | (Kind::Mul(a, b), Kind::Mul(c, d))
            | (Kind::Div(a, b), Kind::Div(c, d)) => a == c && b == d,
            (Kind::Pow(a, r), Kind::Pow(b, s)) => r == s && a == b,
            (Kind::Call(a), Kind::Call(b)) => {
                a.same_func(b) && a.partials == b.partials && a.args == b.args
            }
            _ => false,
        }
    }
}

impl Expr {
    fn raw(kind: Kind) -> Expr {
        let hash = structural_hash(&kind);
        Expr(Arc::new(Node { kind, hash }))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn constant(c: f64) -> Expr {
        // normalise -0.0 so that hashing agrees with equality
        Expr::raw(Kind::Const(if c == 0.0 { 0.0 } else { c }))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    pub fn var(c: Coord) -> Expr {
        Expr::raw(Kind::Var(c))
    }

    pub fn call(func: Arc<dyn Procedural>, args: Vec<Expr>) -> Expr {
        assert_eq!(func.arity(), args.len(), "procedural arity mismatch");
        Expr::raw(Kind::Call(Call { func, args, partials: Vec::new() }))
    }

    pub(crate) fn call_partial(call: &Call, extra: usize) -> Expr {
        let mut partials = call.partials.clone();
        partials.push(extra);
        partials.sort_unstable();
        Expr::raw(Kind::Call(Call { func: call.func.clone(), args: call.args.clone(), partials }))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.kind() {
            Kind::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn neg(&self) -> Expr {
        match self.kind() {
            Kind::Const(c) => Expr::constant(-c),
            Kind::Neg(a) => a.clone(),
            Kind::Sub(a, b) => Expr::raw(Kind::Sub(b.clone(), a.clone())),
            _ => Expr::raw(Kind::Neg(self.clone())),
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        match (self.kind(), other.kind()) {
            (Kind::Const(a), Kind::Const(b)) => Expr::constant(a + b),
            _ if self.is_zero() => other.clone(),
            _ if other.is_zero() => self.clone(),
            (_, Kind::Neg(b)) => self.sub(b),
            (_, Kind::Const(c)) if *c < 0.0 => self.sub(&Expr::constant(-c)),
            _ => Expr::raw(Kind::Add(self.clone(), other.clone())),
        }
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        match (self.kind(), other.kind()) {
            (Kind::Const(a), Kind::Const(b)) => Expr::constant(a - b),
            _ if other.is_zero() => self.clone(),
            _ if self.is_zero() => other.neg(),
            _ if self == other => Expr::zero(),
            (_, Kind::Neg(b)) => self.add(b),
            (_, Kind::Const(c)) if *c < 0.0 => self.add(&Expr::constant(-c)),
            _ => Expr::raw(Kind::Sub(self.clone(), other.clone())),
        }
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        match (self.kind(), other.kind()) {
            (Kind::Const(a), Kind::Const(b)) => Expr::constant(a * b),
            _ if self.is_zero() || other.is_zero() => Expr::zero(),
            _ if self.is_one() => other.clone(),
            _ if other.is_one() => self.clone(),
            (Kind::Const(c), _) if *c == -1.0 => other.neg(),
            (_, Kind::Const(c)) if *c == -1.0 => self.neg(),
            (Kind::Neg(a), Kind::Neg(b)) => a.mul(b),
            (Kind::Neg(a), _) => a.mul(other).neg(),
            (_, Kind::Neg(b)) => self.mul(b).neg(),
            (Kind::Const(a), Kind::Mul(b, c)) if b.as_const().is_some() => {
                Expr::constant(a * b.as_const().unwrap()).mul(c)
            }
            (_, Kind::Const(_)) => other.mul(self),
            _ => Expr::raw(Kind::Mul(self.clone(), other.clone())),
        }
    }

    pub fn div(&self, other: &Expr) -> Expr {
        match (self.kind(), other.kind()) {
            (Kind::Const(a), Kind::Const(b)) if *b != 0.0 => Expr::constant(a / b),
            _ if self.is_zero() => Expr::zero(),
            _ if other.is_one() => self.clone(),
            _ if self == other => Expr::one(),
            (_, Kind::Const(c)) if *c == -1.0 => self.neg(),
            _ => Expr::raw(Kind::Div(self.clone(), other.clone())),
        }
    }

    pub fn powr(&self, r: Rational64) -> Expr {
        if *r.numer() == 0 {
            return Expr::one();
        }
        if r == Rational64::from_integer(1) {
            return self.clone();
        }
        if let Some(c) = self.as_const() {
            if let Ok(v) = eval::pow_value(c, r) {
                return Expr::constant(v);
            }
        }
        if let Kind::Pow(base, s) = self.kind() {
            // (b^s)^r = b^(s r) is only safe for integer exponents
            if s.is_integer() && r.is_integer() {
                return base.powr(s * r);
            }
        }
        Expr::raw(Kind::Pow(self.clone(), r))
    }

    pub fn powi(&self, k: i64) -> Expr {
        self.powr(Rational64::from_integer(k))
    }

    pub fn apply(&self, f: Func) -> Expr {
        if let Some(c) = self.as_const() {
            if let Ok(v) = f.apply(c) {
                if v.is_finite() {
                    return Expr::constant(v);
                }
            }
        }
        Expr::raw(Kind::Func(f, self.clone()))
    }

    pub fn sin(&self) -> Expr {
        self.apply(Func::Sin)
    }
    pub fn cos(&self) -> Expr {
        self.apply(Func::Cos)
    }
    pub fn exp(&self) -> Expr {
        self.apply(Func::Exp)
    }
    pub fn log(&self) -> Expr {
        self.apply(Func::Log)
    }
    pub fn sqrt(&self) -> Expr {
        self.apply(Func::Sqrt)
    }

    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        terms.into_iter().fold(Expr::zero(), |acc, t| acc.add(&t))
    }

    /// Coordinates referenced anywhere in the tree.
    pub fn vars(&self) -> BTreeSet<Coord> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Kind::Var(c) = e.kind() {
                out.insert(*c);
            }
        });
        out
    }

    /// True if the tree contains a procedural call.
    pub fn is_procedural(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| found |= matches!(e.kind(), Kind::Call(_)));
        found
    }

    /// Highest derivative order requested from any procedural call.
    pub fn max_call_order(&self) -> usize {
        let mut order = 0;
        self.visit(&mut |e| {
            if let Kind::Call(c) = e.kind() {
                order = order.max(c.partials.len());
            }
        });
        order
    }

    pub fn node_count(&self) -> usize {
        let mut k = 0;
        self.visit(&mut |_| k += 1);
        k
    }

    fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        let mut seen = std::collections::HashSet::new();
        self.visit_inner(f, &mut seen);
    }

    fn visit_inner(&self, f: &mut dyn FnMut(&Expr), seen: &mut std::collections::HashSet<*const Node>) {
        if Arc::strong_count(&self.0) > 1 && !seen.insert(Arc::as_ptr(&self.0)) {
            return;
        }
        f(self);
        match self.kind() {
            Kind::Const(_) | Kind::Var(_) => {}
            Kind::Neg(a) | Kind::Func(_, a) | Kind::Pow(a, _) => a.visit_inner(f, seen),
            Kind::Add(a, b) | Kind::Sub(a, b) | Kind::Mul(a, b) | Kind::Div(a, b) => {
                a.visit_inner(f, seen);
                b.visit_inner(f, seen);
            }
            Kind::Call(c) => c.args.iter().for_each(|a| a.visit_inner(f, seen)),
        }
    }

    /// Simultaneous substitution of coordinates. Coordinates absent from
    /// `map` are left in place.
    pub fn substitute(&self, map: &HashMap<Coord, Expr>) -> Expr {
        let mut memo = HashMap::new();
        self.subst_inner(map, &mut memo)
    }

    fn subst_inner(&self, map: &HashMap<Coord, Expr>, memo: &mut HashMap<*const Node, Expr>) -> Expr {
        let shared = Arc::strong_count(&self.0) > 1;
        if shared {
            if let Some(e) = memo.get(&Arc::as_ptr(&self.0)) {
                return e.clone();
            }
        }
        let out = match self.kind() {
            Kind::Const(_) => self.clone(),
            Kind::Var(c) => map.get(c).cloned().unwrap_or_else(|| self.clone()),
            Kind::Neg(a) => a.subst_inner(map, memo).neg(),
            Kind::Func(f, a) => a.subst_inner(map, memo).apply(*f),
            Kind::Add(a, b) => a.subst_inner(map, memo).add(&b.subst_inner(map, memo)),
            Kind::Sub(a, b) => a.subst_inner(map, memo).sub(&b.subst_inner(map, memo)),
            Kind::Mul(a, b) => a.subst_inner(map, memo).mul(&b.subst_inner(map, memo)),
            Kind::Div(a, b) => a.subst_inner(map, memo).div(&b.subst_inner(map, memo)),
            Kind::Pow(a, r) => a.subst_inner(map, memo).powr(*r),
            Kind::Call(c) => Expr::raw(Kind::Call(Call {
                func: c.func.clone(),
                args: c.args.iter().map(|a| a.subst_inner(map, memo)).collect(),
                partials: c.partials.clone(),
            })),
        };
        if shared {
            memo.insert(Arc::as_ptr(&self.0), out.clone());
        }
        out
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Expr {
        Expr::constant(c)
    }
}

impl From<Coord> for Expr {
    fn from(c: Coord) -> Expr {
        Expr::var(c)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl std::ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$m(&self, &rhs)
            }
        }
        impl std::ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                Expr::$m(&self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$m(self, &rhs)
            }
        }
        impl std::ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                Expr::$m(self, rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q1() -> Expr {
        Expr::var(Coord::Q(1))
    }

    #[test]
    fn folding_and_absorption() {
        let x = q1();
        assert!((Expr::zero() * &x).is_zero());
        assert_eq!(Expr::one() * &x, x);
        assert_eq!(&x + Expr::zero(), x);
        assert!((&x - &x).is_zero());
        assert_eq!((Expr::constant(2.0) + Expr::constant(3.0)).as_const(), Some(5.0));
        assert_eq!(Expr::constant(0.0).exp().as_const(), Some(1.0));
        assert_eq!(x.powi(1), x);
        assert!(x.powi(0).is_one());
        assert_eq!((-(-x.clone())), x);
    }

    #[test]
    fn structural_equality_ignores_sharing() {
        let a = q1().sin() * Expr::var(Coord::T);
        let b = q1().sin() * Expr::var(Coord::T);
        assert!(!a.ptr_eq(&b));
        assert_eq!(a, b);
        assert_ne!(a, q1().cos() * Expr::var(Coord::T));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let e = q1() - Expr::var(Coord::T);
        let mut map = HashMap::new();
        map.insert(Coord::Q(1), Expr::var(Coord::T));
        map.insert(Coord::T, q1());
        let s = e.substitute(&map);
        assert_eq!(s, Expr::var(Coord::T) - q1());
    }
}
