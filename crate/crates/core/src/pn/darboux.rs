//! Darboux-Nijenhuis coordinates from the eigenvalues of a torsion-free
//! (1,1) tensor with simple real spectrum.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::check::{
    max_abs, run_check, sample_map, CheckOptions, CheckPlan, CheckReport, Identity, Sampler, PROCEDURAL_TOL,
    SYMBOLIC_TOL,
};
use crate::error::{Error, EvalError, Result};
use crate::expr::{EvalCtx, Expr};
use crate::geometry::{nijenhuis_torsion, Components, FibredTransform, Tensor11, Transformable, JACOBIAN_GUARD};
use crate::lifts::complete_lift_tensor11;
use crate::space::{Coord, Space};

use super::eigen::{EigenData, EigenSystem};
use super::poisson::PoissonMap;

/// Steps per segment between consecutive sample points when tracking the
/// eigenvalue ordering.
const TRACK_STEPS: usize = 8;

/// Eigen-decompositions at seeded points of the domain. Points where the
/// tensor itself cannot be evaluated are skipped; eigen failures are errors.
pub fn sample_eigen(r: &Tensor11, opts: &CheckOptions) -> Result<Vec<EigenData>> {
    let sys = EigenSystem::new(r)?;
    sample_with(&sys, r.space(), opts)
}

fn sample_with(sys: &EigenSystem, space: Space, opts: &CheckOptions) -> Result<Vec<EigenData>> {
    let mut sampler = Sampler::new(space, &opts.domain, opts.seed)?;
    let raw = sample_map(&mut sampler, opts.points, |x| match sys.analyse(x) {
        Ok(d) => Ok(Ok(d)),
        Err(EvalError::Eigen(e)) => Ok(Err(e)),
        Err(e) => Err(e),
    })?;
    raw.into_iter().map(|(_, d)| d.map(|d| (*d).clone()).map_err(Error::from)).collect()
}

/// Follows the ascending eigenvalue labels along straight segments between
/// consecutive samples; nearest-value matching must keep every label.
fn track(sys: &EigenSystem, samples: &[EigenData]) -> Result<()> {
    for w in samples.windows(2) {
        let (a, b) = (&w[0].point, &w[1].point);
        let mut prev = w[0].eigenvalues.clone();
        let mut prev_pt = a.clone();
        for k in 1..=TRACK_STEPS {
            let s = k as f64 / TRACK_STEPS as f64;
            let x: Vec<f64> = a.iter().zip(b).map(|(u, v)| u + s * (v - u)).collect();
            let cur = match sys.analyse(&x) {
                Ok(d) => d.eigenvalues.clone(),
                Err(EvalError::Eigen(e)) => return Err(e.into()),
                Err(_) => continue,
            };
            for (i, l) in prev.iter().enumerate() {
                let nearest = cur
                    .iter()
                    .enumerate()
                    .min_by(|x, y| (x.1 - l).abs().total_cmp(&(y.1 - l).abs()))
                    .map(|(j, _)| j);
                // passing through λ₀ = 0 is a collision as well
                if nearest != Some(i) || (cur[i] > 0.0) != (*l > 0.0) {
                    return Err(Error::EigenvalueCrossing(prev_pt, x));
                }
            }
            prev = cur;
            prev_pt = x;
        }
    }
    Ok(())
}

/// Builds `Q^i = λ_i(t, q)` after checking torsion, spectral conditions,
/// label continuity and functional independence on the sampled domain.
pub fn build_dn_transform(r: &Tensor11, opts: &CheckOptions) -> Result<FibredTransform> {
    let sys = Arc::new(EigenSystem::new(r)?);
    let base = r.space();
    let n = base.n;
    let tol = opts.tol.unwrap_or(if r.is_procedural() { PROCEDURAL_TOL } else { SYMBOLIC_TOL });
    let (torsion, _) = max_abs(base, nijenhuis_torsion(r).components(), opts)?;
    if torsion >= tol {
        return Err(Error::TorsionNonzero(torsion));
    }
    let samples = sample_with(&sys, base, opts)?;
    track(&sys, &samples)?;
    let lambdas = sys.eigenvalue_fields();
    let jac: Vec<Expr> = (0..n * n).map(|k| lambdas[k / n].diff(Coord::Q((k % n + 1) as u16))).collect();
    for d in &samples {
        let vals = EvalCtx::new(base, &d.point)?.eval_all(&jac)?;
        if DMatrix::from_row_slice(n, n, &vals).determinant().abs() < JACOBIAN_GUARD {
            return Err(Error::DegenerateJacobian(d.point.clone()));
        }
    }
    FibredTransform::new(n, lambdas, None)
}

/// Checks in the new chart of `t` that
/// (a) `R` is diagonal with each diagonal entry depending only on its own
///     coordinate,
/// (b) the complete lift is `Σ λ_i (∂_{Q^i} ⊗ dQ^i + ∂_{P_i} ⊗ dP_i)`,
/// (c) the Poisson bivector keeps its canonical form.
pub fn verify_dn(r: &Tensor11, t: &FibredTransform, opts: &CheckOptions) -> Result<CheckReport> {
    let base = r.space();
    let n = base.n;
    let phase = Space::phase(n);
    let bmap = t.chart_map(base)?;
    let pmap = t.chart_map(phase)?;

    let rn = r.transform_by(&bmap)?;
    let d = base.dim();
    let off: Vec<Expr> = (0..d * d).filter(|k| k / d != k % d).map(|k| rn.entry(k / d, k % d).clone()).collect();
    let mut local = Vec::new();
    for i in 1..=n {
        for c in base.coords() {
            if c != Coord::Q(i as u16) {
                local.push(rn.entry(i, i).diff(c));
            }
        }
    }
    let base_ids = vec![
        Identity::new("dn.diagonal", "R' - diag(λ_i) = 0", off),
        Identity::new("dn.locality", "∂λ_i/∂t = ∂λ_i/∂Q^j = 0 (j ≠ i)", local),
    ];

    let rtn = complete_lift_tensor11(r)?.transform_by(&pmap)?;
    let expected = Tensor11::from_fn(phase, |a, b| {
        let (ca, cb) = (phase.coord(a), phase.coord(b));
        match (ca, cb) {
            (Coord::Q(i), Coord::Q(j)) | (Coord::P(i), Coord::P(j)) if i == j => rn.entry(i as usize, i as usize).clone(),
            _ => Expr::zero(),
        }
    });
    let pm = PoissonMap::canonical(n);
    let lam = pm.bivector();
    let lam_new = lam.transform_by(&pmap)?;
    let phase_ids = vec![
        Identity::equal("dn.lift_diagonal", "R̃' - Σ λ_i (∂Q⊗dQ + ∂P⊗dP) = 0", rtn.components(), expected.components()),
        Identity::equal("dn.canonical_poisson", "Λ' - Σ ∂Q∧∂P = 0", lam_new.components(), lam.components()),
    ];

    let mut report = run_check(&CheckPlan::new(base, base_ids).through(&bmap), opts)?;
    report.merge(run_check(&CheckPlan::new(phase, phase_ids).through(&pmap), opts)?);
    Ok(report)
}
