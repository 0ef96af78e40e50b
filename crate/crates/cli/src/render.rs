//! Text and JSON renderings of fields. Terms are listed in the order
//! `q`, `p0`, `p`, `t`; components are simplified and zeros omitted.

use std::collections::BTreeMap;

use jetlift_core::expr::Kind;
use jetlift_core::geometry::{Components, OneForm, Tensor11, Tensor12, TwoForm, VectorField};
use jetlift_core::{Coord, Expr, ScalarField, Space};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rendered {
    #[serde(rename = "type")]
    pub ty: &'static str,
    pub space: String,
    /// Non-zero components keyed by coordinate names, comma-separated for
    /// multi-index objects.
    pub components: BTreeMap<String, String>,
    pub text: String,
}

fn rank(c: Coord) -> (u8, u16) {
    match c {
        Coord::Q(i) => (0, i),
        Coord::P0 => (1, 0),
        Coord::P(i) => (2, i),
        Coord::T => (3, 0),
    }
}

fn order(space: Space) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..space.dim()).collect();
    idx.sort_by_key(|&i| rank(space.coord(i)));
    idx
}

fn is_sum(e: &Expr) -> bool {
    matches!(e.kind(), Kind::Add(..) | Kind::Sub(..))
}

/// Joins `coefficient basis` terms into `a ∂q1 - b ∂p1 + ...`.
fn join(terms: &[(Expr, String)]) -> String {
    let mut out = String::new();
    for (coef, basis) in terms {
        let (neg, mag) = match coef.kind() {
            Kind::Neg(inner) => (true, inner.clone()),
            Kind::Const(c) if *c < 0.0 => (true, Expr::constant(-c)),
            Kind::Mul(a, b) if a.as_const().is_some_and(|c| c < 0.0) => (true, a.neg().mul(b)),
            _ => (false, coef.clone()),
        };
        let body = if mag.is_one() {
            basis.clone()
        } else if is_sum(&mag) {
            format!("({mag}) {basis}")
        } else {
            format!("{mag} {basis}")
        };
        match (out.is_empty(), neg) {
            (true, false) => out.push_str(&body),
            (true, true) => out.push_str(&format!("-{body}")),
            (false, false) => out.push_str(&format!(" + {body}")),
            (false, true) => out.push_str(&format!(" - {body}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Renders entries indexed by tuples of coordinate positions.
fn render_indexed(
    ty: &'static str,
    space: Space,
    slots: usize,
    entry: impl Fn(&[usize]) -> Option<Expr>,
    basis: impl Fn(&[Coord]) -> String,
) -> Rendered {
    let ord = order(space);
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..slots {
        tuples = tuples.into_iter().flat_map(|t| ord.iter().map(move |&i| [t.clone(), vec![i]].concat())).collect();
    }
    let mut components = BTreeMap::new();
    let mut terms = Vec::new();
    for t in tuples {
        let Some(e) = entry(&t).map(|e| e.simplify()) else { continue };
        if e.is_zero() {
            continue;
        }
        let coords: Vec<Coord> = t.iter().map(|&i| space.coord(i)).collect();
        let key = coords.iter().map(Coord::to_string).collect::<Vec<_>>().join(",");
        components.insert(key, e.to_string());
        terms.push((e, basis(&coords)));
    }
    Rendered { ty, space: space.to_string(), components, text: join(&terms) }
}

pub fn scalar(f: &ScalarField) -> Rendered {
    let e = f.expr().simplify().to_string();
    let components = BTreeMap::from([("value".to_string(), e.clone())]);
    Rendered { ty: "scalar", space: f.space().to_string(), components, text: e }
}

pub fn vector(x: &VectorField) -> Rendered {
    render_indexed("vector", x.space(), 1, |t| Some(x.component(t[0]).clone()), |c| format!("∂{}", c[0]))
}

pub fn oneform(a: &OneForm) -> Rendered {
    render_indexed("oneform", a.space(), 1, |t| Some(a.component(t[0]).clone()), |c| format!("d{}", c[0]))
}

pub fn tensor11(r: &Tensor11) -> Rendered {
    render_indexed("tensor11", r.space(), 2, |t| Some(r.entry(t[0], t[1]).clone()), |c| format!("∂{}⊗d{}", c[0], c[1]))
}

/// Each pair `a, b` with `a` before `b` in display order, as `ω_ab dx^a∧dx^b`.
pub fn twoform(w: &TwoForm) -> Rendered {
    let s = w.space();
    let pos: Vec<usize> = {
        let ord = order(s);
        let mut p = vec![0; s.dim()];
        for (k, &i) in ord.iter().enumerate() {
            p[i] = k;
        }
        p
    };
    render_indexed(
        "twoform",
        s,
        2,
        |t| (pos[t[0]] < pos[t[1]]).then(|| w.entry(t[0], t[1]).clone()),
        |c| format!("d{}∧d{}", c[0], c[1]),
    )
}

pub fn tensor12(n: &Tensor12) -> Rendered {
    render_indexed(
        "tensor12",
        n.space(),
        3,
        |t| Some(n.entry(t[0], t[1], t[2]).clone()),
        |c| format!("∂{}⊗d{}⊗d{}", c[0], c[1], c[2]),
    )
}

pub fn list(exprs: &[Expr]) -> Vec<String> {
    exprs.iter().map(|e| e.simplify().to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use jetlift_core::parse_expr;

    #[test]
    fn term_order_and_signs() {
        let s = Space::phase(1);
        let a = OneForm::new(s, vec![parse_expr("p1*t", &s).unwrap(), parse_expr("p1*q1", &s).unwrap(), Expr::zero()]).unwrap();
        assert_eq!(oneform(&a).text, "p1*q1 dq1 + p1*t dt");
        let x = VectorField::new(s, vec![Expr::one(), parse_expr("q1 + t", &s).unwrap(), parse_expr("-2*p1", &s).unwrap()]).unwrap();
        let r = vector(&x);
        assert_eq!(r.text, "(q1 + t) ∂q1 - 2*p1 ∂p1 + ∂t");
        assert_eq!(r.components.len(), 3);
        assert_eq!(vector(&VectorField::zero(s)).text, "0");
    }
}
