//! Expanded polynomial normal form over non-polynomial atoms, used to print
//! lifted objects compactly.

use std::cmp::Reverse;
use std::collections::{BTreeMap, HashMap};

use super::{Expr, Kind};

/// Expansions larger than this are abandoned and the input is kept.
const MAX_TERMS: usize = 64;
const MAX_EXPAND_POWER: i64 = 6;

/// Atom keys (printed form) with integer exponents, sorted by key.
type Monomial = Vec<(String, i64)>;

#[derive(Clone, Debug, Default)]
struct Poly(BTreeMap<Monomial, f64>);

struct TooBig;

impl Poly {
    fn constant(c: f64) -> Poly {
        let mut p = Poly::default();
        if c != 0.0 {
            p.0.insert(Vec::new(), c);
        }
        p
    }

    fn monomial(key: String, exp: i64) -> Poly {
        let mut p = Poly::default();
        p.0.insert(vec![(key, exp)], 1.0);
        p
    }

    fn single(&self) -> Option<(&Monomial, f64)> {
        (self.0.len() == 1).then(|| self.0.iter().next().map(|(m, c)| (m, *c)).unwrap())
    }

    fn add_term(&mut self, m: Monomial, c: f64) {
        let e = self.0.entry(m).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.0.retain(|_, c| *c != 0.0);
        }
    }

    fn plus(mut self, other: &Poly, sign: f64) -> Result<Poly, TooBig> {
        for (m, c) in &other.0 {
            self.add_term(m.clone(), sign * c);
        }
        bounded(self)
    }

    fn scale(mut self, s: f64) -> Poly {
        if s == 0.0 {
            return Poly::default();
        }
        self.0.values_mut().for_each(|c| *c *= s);
        self
    }

    fn times(&self, other: &Poly) -> Result<Poly, TooBig> {
        if self.0.len() * other.0.len() > MAX_TERMS * MAX_TERMS {
            return Err(TooBig);
        }
        let mut out = Poly::default();
        for (a, ca) in &self.0 {
            for (b, cb) in &other.0 {
                out.add_term(mono_mul(a, b, 1), ca * cb);
            }
        }
        bounded(out)
    }
}

fn bounded(p: Poly) -> Result<Poly, TooBig> {
    if p.0.len() > MAX_TERMS {
        Err(TooBig)
    } else {
        Ok(p)
    }
}

fn mono_mul(a: &Monomial, b: &Monomial, sign: i64) -> Monomial {
    let mut m: BTreeMap<String, i64> = a.iter().cloned().collect();
    for (k, e) in b {
        *m.entry(k.clone()).or_insert(0) += sign * e;
    }
    m.into_iter().filter(|(_, e)| *e != 0).collect()
}

#[derive(Default)]
struct Normalizer {
    atoms: HashMap<String, Expr>,
}

impl Normalizer {
    fn atom(&mut self, e: Expr, exp: i64) -> Poly {
        if let Some(c) = e.as_const() {
            return Poly::constant(c.powi(exp as i32));
        }
        let key = e.to_string();
        self.atoms.entry(key.clone()).or_insert(e);
        Poly::monomial(key, exp)
    }

    fn poly(&mut self, e: &Expr) -> Result<Poly, TooBig> {
        Ok(match e.kind() {
            Kind::Const(c) => Poly::constant(*c),
            Kind::Var(_) | Kind::Call(_) => self.atom(e.clone(), 1),
            Kind::Neg(a) => self.poly(a)?.scale(-1.0),
            Kind::Add(a, b) => self.poly(a)?.plus(&self.poly(b)?, 1.0)?,
            Kind::Sub(a, b) => self.poly(a)?.plus(&self.poly(b)?, -1.0)?,
            Kind::Mul(a, b) => self.poly(a)?.times(&self.poly(b)?)?,
            Kind::Div(a, b) => {
                let num = self.poly(a)?;
                let den = self.poly(b)?;
                match den.single() {
                    Some((m, c)) => {
                        let inv: Poly = Poly(num.0.into_iter().map(|(k, v)| (mono_mul(&k, m, -1), v / c)).collect());
                        bounded(inv)?
                    }
                    None => {
                        let d = self.expr(&den);
                        num.times(&self.atom(d, -1))?
                    }
                }
            }
            Kind::Pow(a, r) if r.is_integer() => {
                let k = *r.numer();
                let base = self.poly(a)?;
                match base.single() {
                    Some((m, c)) => Poly(
                        [(m.iter().map(|(key, e)| (key.clone(), e * k)).collect(), c.powi(k as i32))].into_iter().collect(),
                    ),
                    None if (1..=MAX_EXPAND_POWER).contains(&k) => {
                        let mut acc = base.clone();
                        for _ in 1..k {
                            acc = acc.times(&base)?;
                        }
                        acc
                    }
                    None => {
                        let b = self.expr(&base);
                        self.atom(b, k)
                    }
                }
            }
            Kind::Pow(a, r) => {
                let b = normalize(a);
                self.atom(b.powr(*r), 1)
            }
            Kind::Func(f, a) => self.atom(normalize(a).apply(*f), 1),
        })
    }

    fn expr(&self, p: &Poly) -> Expr {
        let mut terms: Vec<(&Monomial, f64)> = p.0.iter().map(|(m, c)| (m, *c)).collect();
        let degree = |m: &Monomial| m.iter().map(|(_, e)| (*e).max(0)).sum::<i64>();
        terms.sort_by_key(|(m, _)| Reverse(degree(m)));
        let mut out: Option<Expr> = None;
        for (m, c) in terms {
            let mut num = Expr::constant(c.abs());
            let mut den = Expr::one();
            for (key, e) in m {
                let a = &self.atoms[key];
                if *e > 0 {
                    num = num.mul(&a.powi(*e));
                } else {
                    den = den.mul(&a.powi(-e));
                }
            }
            let mag = num.div(&den);
            out = Some(match out {
                None if c < 0.0 => mag.neg(),
                None => mag,
                Some(acc) if c < 0.0 => acc.sub(&mag),
                Some(acc) => acc.add(&mag),
            });
        }
        out.unwrap_or_else(Expr::zero)
    }
}

fn normalize(e: &Expr) -> Expr {
    let mut n = Normalizer::default();
    match n.poly(e) {
        Ok(p) => {
            let s = n.expr(&p);
            if s.node_count() <= e.node_count() {
                s
            } else {
                e.clone()
            }
        }
        Err(TooBig) => e.clone(),
    }
}

impl Expr {
    /// Expands products and integer powers of sums, collects like terms and
    /// cancels common factors of monomials. Non-polynomial subexpressions are
    /// normalised recursively and treated as atoms. The result is kept only
    /// when it is no larger than `self`.
    pub fn simplify(&self) -> Expr {
        normalize(self)
    }
}
