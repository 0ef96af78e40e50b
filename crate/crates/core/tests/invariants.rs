use jetlift_core::check::{max_abs, run_check, CheckOptions, CheckPlan, Domain, Identity};
use jetlift_core::geometry::{
    exterior_derivative, haantjes_tensor, lie_bracket, nijenhuis_torsion, Components, FibredTransform, LieDerivative,
    OneForm, Tensor11, Transformable, VectorField,
};
use jetlift_core::identities::{run_suites, Corpus, Suite};
use jetlift_core::pn::{eigenvalue_fields, hamiltonian_vector_field, poisson_bracket};
use jetlift_core::{parse_expr, Coord, Expr, ScalarField, Space};

const T: Coord = Coord::T;
const Q1: Coord = Coord::Q(1);
const Q2: Coord = Coord::Q(2);

fn e(src: &str, s: Space) -> Expr {
    parse_expr(src, &s).unwrap()
}

fn field(s: Space, pairs: &[(Coord, &str)]) -> VectorField {
    let pairs: Vec<_> = pairs.iter().map(|(c, src)| (*c, e(src, s))).collect();
    VectorField::from_pairs(s, &pairs).unwrap()
}

fn tensor(s: Space, pairs: &[((Coord, Coord), &str)]) -> Tensor11 {
    let pairs: Vec<_> = pairs.iter().map(|(c, src)| (*c, e(src, s))).collect();
    Tensor11::from_pairs(s, &pairs).unwrap()
}

fn vanishes(space: Space, exprs: &[Expr], tol: f64) -> bool {
    let (m, at) = max_abs(space, exprs, &CheckOptions::default()).unwrap();
    assert!(m < tol, "residual {m:e} at {at:?}");
    true
}

fn diff<T: Components>(a: &T, b: &T) -> Vec<Expr> {
    a.components().iter().zip(b.components()).map(|(x, y)| x.sub(y)).collect()
}

fn generic_r() -> Tensor11 {
    let s = Space::base(2);
    tensor(s, &[((Q1, Q1), "q1*q2"), ((Q1, Q2), "t"), ((Q1, T), "q2"), ((Q2, Q1), "sin(q1)"), ((Q2, Q2), "q2^2 + t")])
}

#[test]
fn torsion_and_haantjes_are_tensorial() {
    let s = Space::base(2);
    let r = generic_r();
    let f = e("t*q1 + cos(q2)", s);
    let x = field(s, &[(T, "1"), (Q1, "q2^2")]);
    let y = field(s, &[(Q1, "t"), (Q2, "q1*q2")]);
    let n = nijenhuis_torsion(&r);
    let h = haantjes_tensor(&r);
    for tens in [&n, &h] {
        let lhs = tens.on(&x.scale(&f), &y).unwrap();
        let rhs = tens.on(&x, &y).unwrap().scale(&f);
        assert!(vanishes(s, &diff(&lhs, &rhs), 1e-9));
        let lhs = tens.on(&x, &y.scale(&f)).unwrap();
        assert!(vanishes(s, &diff(&lhs, &rhs), 1e-9));
    }
}

#[test]
fn torsion_contraction_formula_on_coordinate_fields() {
    let r = generic_r();
    let s = r.space();
    let n = nijenhuis_torsion(&r);
    for a in 0..s.dim() {
        let x = VectorField::coordinate(s, a);
        let lhs = n.interior(&x).unwrap();
        let rhs = r.lie_derivative(&r.apply(&x).unwrap()).unwrap().sub(&r.compose(&r.lie_derivative(&x).unwrap()).unwrap()).unwrap();
        assert!(vanishes(s, &diff(&lhs, &rhs), 1e-9));
    }
}

#[test]
fn haantjes_examples() {
    let s = Space::base(1);
    let twisted = tensor(s, &[((Q1, Q1), "q1"), ((Q1, T), "t")]);
    let n = nijenhuis_torsion(&twisted);
    let h = haantjes_tensor(&twisted);
    let (dt, dq) = (VectorField::coordinate(s, 0), VectorField::coordinate(s, 1));
    assert!(!vanishes_quietly(s, n.on(&dt, &dq).unwrap().components()));
    assert!(vanishes(s, h.components(), 1e-9));
    let constant = tensor(Space::base(2), &[((Q1, Q1), "2"), ((Q1, Q2), "1"), ((Q2, Q2), "-3"), ((Q1, T), "5")]);
    assert!(nijenhuis_torsion(&constant).is_structurally_zero());
    assert!(vanishes(Space::base(2), haantjes_tensor(&constant).components(), 1e-12));
}

fn vanishes_quietly(space: Space, exprs: &[Expr]) -> bool {
    max_abs(space, exprs, &CheckOptions::default()).unwrap().0 < 1e-9
}

#[test]
fn lie_bracket_jacobi_and_exactness() {
    let s = Space::base(2);
    let x = field(s, &[(T, "1"), (Q1, "q1*q2"), (Q2, "t^2")]);
    let y = field(s, &[(Q1, "q2^3 - t"), (Q2, "q1")]);
    let z = field(s, &[(Q1, "t*q1"), (Q2, "q1^2*q2 + 1")]);
    let br = |a: &VectorField, b: &VectorField| lie_bracket(a, b).unwrap();
    let jac = br(&x, &br(&y, &z)).add(&br(&y, &br(&z, &x))).unwrap().add(&br(&z, &br(&x, &y))).unwrap();
    assert!(vanishes(s, jac.components(), 1e-9));
    for src in ["t*q1^2*sin(q2)", "exp(q1 - t)*q2"] {
        let df = OneForm::differential(s, &e(src, s));
        assert!(vanishes(s, exterior_derivative(&df).components(), 1e-12));
    }
}

#[test]
fn transforms_preserve_brackets_with_newton_inverse() {
    let s = Space::base(1);
    let x = field(s, &[(T, "1"), (Q1, "q1^2")]);
    let y = field(s, &[(Q1, "t*q1")]);
    let newton = FibredTransform::parse(1, &["exp(t)*q1"], None).unwrap();
    let map = newton.chart_map(s).unwrap();
    let lhs = lie_bracket(&x, &y).unwrap().transform_by(&map).unwrap();
    let rhs = lie_bracket(&x.transform_by(&map).unwrap(), &y.transform_by(&map).unwrap()).unwrap();
    let plan = CheckPlan::new(s, vec![Identity::equal("bracket", "", lhs.components(), rhs.components())]).through(&map);
    let report = run_check(&plan, &CheckOptions::default()).unwrap();
    assert_eq!(report.tolerance, 1e-6);
    assert!(report.all_pass(), "{report:?}");
}

#[test]
fn naturality_suite_with_newton_inverse() {
    let mut corpus = Corpus::standard(1).unwrap();
    corpus.transforms = vec![("exp_newton".into(), FibredTransform::parse(1, &["exp(t)*q1"], None).unwrap())];
    let run = run_suites(&[Suite::Naturality], &corpus, &CheckOptions::default()).unwrap();
    for r in &run.report.results {
        assert_eq!(r.tolerance, 1e-6);
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn poisson_bracket_is_a_lie_bracket() {
    let s = Space::phase(2);
    let f = ScalarField::parse("q1*p2^2 + t*q2", s).unwrap();
    let g = ScalarField::parse("p1*p2 - q1^2*q2", s).unwrap();
    let h = ScalarField::parse("q2*p1^3 + t*p2*q1", s).unwrap();
    let pb = |a: &ScalarField, b: &ScalarField| poisson_bracket(a, b).unwrap();
    let jac = Expr::sum([pb(&f, &pb(&g, &h)), pb(&g, &pb(&h, &f)), pb(&h, &pb(&f, &g))].map(ScalarField::into_expr));
    assert!(vanishes(s, &[jac], 1e-9));
    let anti = pb(&f, &g).expr().add(pb(&g, &f).expr());
    assert!(vanishes(s, &[anti], 1e-12));
}

/// `h = p²/2 + t q`: `X_h = ∂_t + p ∂_q - t ∂_p`, and `X_h(h) = ∂h/∂t = q`.
#[test]
fn hamiltonian_field_of_a_time_dependent_function() {
    let s = Space::phase(1);
    let h = ScalarField::parse("p1^2/2 + t*q1", s).unwrap();
    let xh = hamiltonian_vector_field(&h).unwrap();
    let oracle = field(s, &[(T, "1"), (Q1, "p1"), (Coord::P(1), "-t")]);
    assert!(vanishes(s, &diff(&xh, &oracle), 1e-12));
    assert!(vanishes(s, &[xh.derivative_of(h.expr()).sub(&e("q1", s))], 1e-12));
}

fn pushed_diagonal() -> Tensor11 {
    let s = Space::base(2);
    tensor(
        s,
        &[
            ((Q1, Q1), "q1 - t*q2"),
            ((Q1, Q2), "-t*(q1 - t*q2) + t*(q2 + 3)"),
            ((Q1, T), "-q2*(q1 - t*q2)"),
            ((Q2, Q2), "q2 + 3"),
        ],
    )
}

/// `R X = λ X` for the eigenfields, the torsion expansion on commuting
/// eigenfields, and the Haantjes tensor on them.
fn check_eigenframe(r: &Tensor11, frame: [&VectorField; 2], lambdas: [&Expr; 2], opts: &CheckOptions, tol: f64) {
    let s = r.space();
    let mut ids = Vec::new();
    for (x, l) in frame.iter().zip(lambdas) {
        ids.push(Identity::equal("eigen", "", r.apply(x).unwrap().components(), x.scale(l).components()));
    }
    let [xa, xb] = frame;
    let [la, lb] = lambdas;
    let n = nijenhuis_torsion(r).on(xa, xb).unwrap();
    let expansion = xb.scale(&xa.derivative_of(lb)).add(&xa.scale(&xb.derivative_of(la))).unwrap().scale(&la.sub(lb));
    if lie_bracket(xa, xb).unwrap().components().iter().all(Expr::is_zero) {
        ids.push(Identity::equal("torsion_expansion", "", n.components(), expansion.components()));
    }
    let h = haantjes_tensor(r).on(xa, xb).unwrap();
    let shifted = |l: &Expr| r.shift(l);
    let p = shifted(la).square().compose(&shifted(lb).square()).unwrap();
    let rhs = p.apply(&lie_bracket(xa, xb).unwrap()).unwrap();
    ids.push(Identity::equal("haantjes", "", h.components(), rhs.components()));
    let report = run_check(&CheckPlan::new(s, ids), opts).unwrap();
    for res in &report.results {
        assert!(res.max_residual < tol, "{res:?}");
    }
}

#[test]
fn eigenframe_identities_for_the_pushed_example() {
    let r = pushed_diagonal();
    let s = r.space();
    let opts = CheckOptions { domain: Domain::parse("0.8,1.2;4.5,5.5;1.8,2.2").unwrap(), ..CheckOptions::default() };
    let xu = field(s, &[(Q1, "1")]);
    let xv = field(s, &[(Q1, "t"), (Q2, "1")]);
    let (lu, lv) = (e("q1 - t*q2", s), e("q2 + 3", s));
    check_eigenframe(&r, [&xu, &xv], [&lu, &lv], &opts, 1e-9);

    // the same with the procedural eigenvalues
    let lambdas = eigenvalue_fields(&r).unwrap();
    check_eigenframe(&r, [&xu, &xv], [&lambdas[0], &lambdas[1]], &opts, 1e-6);
    let local = [xu.derivative_of(&lambdas[1]), xv.derivative_of(&lambdas[0])];
    let (m, _) = max_abs(s, &local, &opts).unwrap();
    assert!(m < 1e-6, "{m:e}");
}

/// A diagonal tensor whose eigenvalues depend on the other coordinate has
/// torsion, matching the expansion; non-commuting eigenfields still give a
/// Haantjes tensor that vanishes.
#[test]
fn eigenframe_identities_for_a_torsion_bearing_diagonal() {
    let s = Space::base(2);
    let r = tensor(s, &[((Q1, Q1), "q2"), ((Q2, Q2), "q1 + 5")]);
    let opts = CheckOptions::default();
    let (l1, l2) = (e("q2", s), e("q1 + 5", s));
    let (x1, x2) = (VectorField::coordinate(s, 1), VectorField::coordinate(s, 2));
    check_eigenframe(&r, [&x1, &x2], [&l1, &l2], &opts, 1e-9);
    assert!(!vanishes_quietly(s, nijenhuis_torsion(&r).components()));
    let y1 = field(s, &[(Q1, "exp(q2)")]);
    let y2 = field(s, &[(Q2, "1 + q1^2")]);
    check_eigenframe(&r, [&y1, &y2], [&l1, &l2], &opts, 1e-9);
    assert!(vanishes(s, haantjes_tensor(&r).components(), 1e-9));
}
