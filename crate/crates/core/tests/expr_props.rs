use std::sync::Arc;

use jetlift_core::{parse_expr, Coord, EvalCtx, EvalError, Expr, Procedural, Space};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

const SPACE: Space = Space::base(2);
const COORDS: [Coord; 3] = [Coord::T, Coord::Q(1), Coord::Q(2)];

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0usize..3).prop_map(|i| Expr::var(COORDS[i])),
        (-3i32..=3).prop_map(|k| Expr::constant(k as f64)),
        (1i32..=4).prop_map(|k| Expr::constant(k as f64 / 4.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.cos()),
            inner.clone().prop_map(|a| a.powi(2)),
            inner.prop_map(|a| a.mul(&Expr::constant(0.5)).exp()),
        ]
    })
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-2.0f64..2.0, 3)
}

fn eval(e: &Expr, x: &[f64]) -> f64 {
    EvalCtx::new(SPACE, x).unwrap().eval(e).unwrap()
}

fn config() -> Config {
    Config { cases: 64, rng_seed: RngSeed::Fixed(0), failure_persistence: None, ..Config::default() }
}

/// Wraps a symbolic expression as an opaque procedural function of
/// `(t, q1, q2)`.
#[derive(Debug)]
struct Opaque {
    f: Expr,
    grad: Vec<Expr>,
}

impl Procedural for Opaque {
    fn name(&self) -> String {
        "opaque".into()
    }
    fn arity(&self) -> usize {
        3
    }
    fn value(&self, x: &[f64]) -> Result<f64, EvalError> {
        EvalCtx::new(SPACE, x)?.eval(&self.f)
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        EvalCtx::new(SPACE, x)?.eval_all(&self.grad)
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn mixed_partials_commute(f in expr(), x in point(), a in 0usize..3, b in 0usize..3) {
        let (ca, cb) = (COORDS[a], COORDS[b]);
        let r = eval(&f.diff(ca).diff(cb), &x) - eval(&f.diff(cb).diff(ca), &x);
        prop_assert!(r.abs() < 1e-9, "{f}: {r:e}");
    }

    #[test]
    fn leibniz_rule(f in expr(), g in expr(), x in point(), a in 0usize..3) {
        let c = COORDS[a];
        let lhs = f.mul(&g).diff(c);
        let rhs = f.mul(&g.diff(c)).add(&g.mul(&f.diff(c)));
        let r = eval(&lhs, &x) - eval(&rhs, &x);
        prop_assert!(r.abs() < 1e-9, "{f} · {g}: {r:e}");
    }

    #[test]
    fn print_parse_round_trip(f in expr(), x in point()) {
        let printed = f.to_string();
        let back = parse_expr(&printed, &SPACE).unwrap();
        let r = eval(&f, &x) - eval(&back, &x);
        prop_assert!(r.abs() < 1e-12, "{printed}: {r:e}");
    }

    #[test]
    fn simplify_preserves_values(f in expr(), g in expr(), x in point()) {
        let s = f.simplify();
        prop_assert!(s.node_count() <= f.node_count());
        let (a, b) = (eval(&f, &x), eval(&s, &x));
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{f} -> {s}: {a} vs {b}");
        let comm = f.add(&g).mul(&f.sub(&g)).sub(&f.powi(2)).add(&g.powi(2)).simplify();
        prop_assert!(eval(&comm, &x).abs() <= 1e-9 * (1.0 + eval(&f, &x).powi(2) + eval(&g, &x).powi(2)));
    }

    #[test]
    fn procedural_second_derivatives_match(f in expr(), x in point(), a in 0usize..3, b in 0usize..3) {
        let grad = COORDS.iter().map(|&c| f.diff(c)).collect();
        let call = Expr::call(Arc::new(Opaque { f: f.clone(), grad }), COORDS.iter().map(|&c| Expr::var(c)).collect());
        let (ca, cb) = (COORDS[a], COORDS[b]);
        prop_assert!((eval(&call.diff(ca), &x) - eval(&f.diff(ca), &x)).abs() < 1e-12);
        let r = eval(&call.diff(ca).diff(cb), &x) - eval(&f.diff(ca).diff(cb), &x);
        prop_assert!(r.abs() < 1e-6, "{f}: {r:e}");
    }
}

#[test]
fn third_order_procedural_derivative_is_refused() {
    let f = parse_expr("q1^3", &SPACE).unwrap();
    let grad = COORDS.iter().map(|&c| f.diff(c)).collect();
    let call = Expr::call(Arc::new(Opaque { f, grad }), COORDS.iter().map(|&c| Expr::var(c)).collect());
    let q = Coord::Q(1);
    let third = call.diff(q).diff(q).diff(q);
    let err = EvalCtx::new(SPACE, &[0.0, 1.0, 1.0]).unwrap().eval(&third);
    assert!(matches!(err, Err(EvalError::OrderOverflow(3))));
}
