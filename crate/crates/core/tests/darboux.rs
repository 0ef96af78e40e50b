use std::time::Instant;

use jetlift_core::check::{CheckOptions, Domain};
use jetlift_core::geometry::{FibredTransform, Tensor11};
use jetlift_core::pn::{build_dn_transform, eigen_analysis, verify_dn};
use jetlift_core::{parse_expr, Coord, Error, EvalCtx, Space};

/// `R₀ = u ∂_u⊗du + (v+3) ∂_v⊗dv` written in `q¹ = u + t·v`, `q² = v`.
fn pushed_diagonal() -> Tensor11 {
    let s = Space::base(2);
    let e = |src: &str| parse_expr(src, &s).unwrap();
    let (t, q1, q2) = (Coord::T, Coord::Q(1), Coord::Q(2));
    Tensor11::from_pairs(
        s,
        &[
            ((q1, q1), e("q1 - t*q2")),
            ((q1, q2), e("-t*(q1 - t*q2) + t*(q2 + 3)")),
            ((q1, t), e("-q2*(q1 - t*q2)")),
            ((q2, q2), e("q2 + 3")),
            ((q2, t), e("0")),
        ],
    )
    .unwrap()
}

fn domain() -> Domain {
    Domain::parse("0.8,1.2;4.5,5.5;1.8,2.2").unwrap()
}

/// Oracle: `R(X)` for `X = ∂_u` and `X = ∂_v` (pushed forward) must give
/// `u ∂_u` and `(v+3) ∂_v`, where `∂_u = ∂_{q1}`, `∂_v = t ∂_{q1} + ∂_{q2}`.
#[test]
fn example_tensor_matches_hidden_diagonal_form() {
    let r = pushed_diagonal();
    let s = Space::base(2);
    for pt in [[1.0, 5.0, 2.0], [0.9, 4.7, 2.1], [-0.3, 0.4, 1.7]] {
        let (t, q1, q2) = (pt[0], pt[1], pt[2]);
        let (u, v) = (q1 - t * q2, q2);
        let m: Vec<f64> = (0..9).map(|k| r.entry(k / 3, k % 3).eval(&s, &pt).unwrap()).collect();
        let apply = |x: [f64; 3]| -> Vec<f64> { (0..3).map(|a| (0..3).map(|b| m[a * 3 + b] * x[b]).sum()).collect() };
        let du = apply([0.0, 1.0, 0.0]);
        assert!((du[1] - u).abs() < 1e-12 && du[2].abs() < 1e-12);
        let dv = apply([0.0, t, 1.0]);
        assert!((dv[1] - (v + 3.0) * t).abs() < 1e-12 && (dv[2] - (v + 3.0)).abs() < 1e-12);
        // ∂_t at fixed (u, v) is ∂_t + v ∂_{q1}, and is annihilated
        let dt = apply([1.0, v, 0.0]);
        assert!(dt.iter().all(|c| c.abs() < 1e-12));
    }
}

#[test]
fn eigenvalues_at_reference_point() {
    let d = eigen_analysis(&pushed_diagonal(), &[1.0, 5.0, 2.0]).unwrap();
    assert!((d.eigenvalues[0] - 3.0).abs() < 1e-8);
    assert!((d.eigenvalues[1] - 5.0).abs() < 1e-8);
    assert_eq!(d.lambda0, 0.0);
}

#[test]
fn builds_and_verifies_eigenvalue_coordinates() {
    let start = Instant::now();
    let r = pushed_diagonal();
    let opts = CheckOptions { domain: domain(), ..CheckOptions::default() };
    let t = build_dn_transform(&r, &opts).unwrap();
    let s = Space::base(2);
    let pt = [1.0, 5.0, 2.0];
    let q = EvalCtx::new(s, &pt).unwrap().eval_all(t.forward()).unwrap();
    assert!((q[0] - 3.0).abs() < 1e-8 && (q[1] - 5.0).abs() < 1e-8);
    for x in [[0.9, 4.8, 1.9], [1.15, 5.3, 2.05]] {
        let q = EvalCtx::new(s, &x).unwrap().eval_all(t.forward()).unwrap();
        assert!((q[0] - (x[1] - x[0] * x[2])).abs() < 1e-10);
        assert!((q[1] - (x[2] + 3.0)).abs() < 1e-10);
    }
    let report = verify_dn(&r, &t, &opts).unwrap();
    for res in &report.results {
        assert!(res.pass, "{res:?}");
        assert_eq!(res.tolerance, 1e-6);
    }
    assert!(start.elapsed().as_secs_f64() < 30.0, "took {:?}", start.elapsed());
}

#[test]
fn symbolic_dn_transform_also_verifies() {
    let r = pushed_diagonal();
    let t = FibredTransform::parse(2, &["q1 - t*q2", "q2 + 3"], Some(&["q1 + t*(q2 - 3)", "q2 - 3"])).unwrap();
    let opts = CheckOptions { domain: domain(), ..CheckOptions::default() };
    let report = verify_dn(&r, &t, &opts).unwrap();
    assert!(report.all_pass(), "{report:?}");
    assert_eq!(report.tolerance, 1e-9);
}

#[test]
fn wrong_transform_fails_diagonality() {
    let r = pushed_diagonal();
    let t = FibredTransform::parse(2, &["q1", "q2 + 3"], Some(&["q1", "q2 - 3"])).unwrap();
    let opts = CheckOptions { domain: domain(), ..CheckOptions::default() };
    let report = verify_dn(&r, &t, &opts).unwrap();
    assert!(!report.get("dn.diagonal").unwrap().pass);
}

#[test]
fn refusals() {
    let s = Space::base(1);
    let twisted = Tensor11::from_pairs(
        s,
        &[
            ((Coord::Q(1), Coord::Q(1)), parse_expr("q1", &s).unwrap()),
            ((Coord::Q(1), Coord::T), parse_expr("t", &s).unwrap()),
        ],
    )
    .unwrap();
    let opts = CheckOptions { domain: Domain::parse("0.5,2").unwrap(), ..CheckOptions::default() };
    assert!(matches!(build_dn_transform(&twisted, &opts), Err(Error::TorsionNonzero(_))));

    let constant = Tensor11::from_pairs(s, &[((Coord::Q(1), Coord::Q(1)), parse_expr("2", &s).unwrap())]).unwrap();
    assert!(matches!(build_dn_transform(&constant, &opts), Err(Error::DegenerateJacobian(_))));

    let diag = Tensor11::from_pairs(s, &[((Coord::Q(1), Coord::Q(1)), parse_expr("q1", &s).unwrap())]).unwrap();
    let t = build_dn_transform(&diag, &opts).unwrap();
    assert!(verify_dn(&diag, &t, &opts).unwrap().all_pass());
    assert!(verify_dn(&diag, &FibredTransform::identity(1), &opts).unwrap().all_pass());

    // eigenvalue crosses zero inside the domain
    let wide = CheckOptions { domain: Domain::parse("-2,2").unwrap(), ..CheckOptions::default() };
    assert!(matches!(build_dn_transform(&diag, &wide), Err(Error::EigenvalueCrossing(..) | Error::Eigen(_))));
}
