//! Pointwise verification of identities at seeded random points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, EvalError, Result};
use crate::expr::{EvalCtx, Expr};
use crate::geometry::{with_seed_hint, ChartMap};
use crate::space::Space;

pub const SYMBOLIC_TOL: f64 = 1e-9;
pub const PROCEDURAL_TOL: f64 = 1e-6;
pub const DEFAULT_POINTS: usize = 64;

/// Sampling box: either one interval for every coordinate or one per
/// coordinate of the sampled chart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Domain {
    bounds: Vec<(f64, f64)>,
}

impl Default for Domain {
    fn default() -> Self {
        Domain::uniform(-2.0, 2.0)
    }
}

impl Domain {
    pub fn uniform(lo: f64, hi: f64) -> Self {
        Domain { bounds: vec![(lo, hi)] }
    }

    pub fn per_coordinate(bounds: Vec<(f64, f64)>) -> Self {
        Domain { bounds }
    }

    /// Parses `"lo,hi"` or `"lo,hi;lo,hi;..."`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse { pos: 0, msg: format!("bad domain `{s}`, expected lo,hi[;lo,hi...]") };
        let bounds = s
            .split(';')
            .map(|part| {
                let (lo, hi) = part.split_once(',').ok_or_else(bad)?;
                let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
                let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
                if lo >= hi || !lo.is_finite() || !hi.is_finite() {
                    return Err(bad());
                }
                Ok((lo, hi))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Domain { bounds })
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Bounds for every coordinate of `space`. Per-coordinate boxes given
    /// for the base chart extend to momenta with the default interval.
    pub fn bounds_for(&self, space: Space) -> Result<Vec<(f64, f64)>> {
        let d = space.dim();
        match self.bounds.len() {
            1 => Ok(vec![self.bounds[0]; d]),
            k if k == d => Ok(self.bounds.clone()),
            k if k == space.base_space().dim() => {
                let mut b = self.bounds.clone();
                b.resize(d, (-2.0, 2.0));
                Ok(b)
            }
            k => Err(Error::WrongSpace(format!("domain has {k} intervals, {space} has {d} coordinates"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub points: usize,
    pub seed: u64,
    /// Overrides the automatic symbolic/procedural tolerance.
    pub tol: Option<f64>,
    pub domain: Domain,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { points: DEFAULT_POINTS, seed: 0, tol: None, domain: Domain::default() }
    }
}

/// A named identity whose residual expressions must vanish pointwise.
#[derive(Clone, Debug)]
pub struct Identity {
    pub id: String,
    pub reference: String,
    pub residuals: Vec<Expr>,
    /// Tighter or looser tolerance than the run default.
    pub tol: Option<f64>,
}

impl Identity {
    pub fn new(id: impl Into<String>, reference: impl Into<String>, residuals: Vec<Expr>) -> Self {
        Identity { id: id.into(), reference: reference.into(), residuals, tol: None }
    }

    /// Residuals `lhs_i - rhs_i`.
    pub fn equal(id: impl Into<String>, reference: impl Into<String>, lhs: &[Expr], rhs: &[Expr]) -> Self {
        assert_eq!(lhs.len(), rhs.len(), "identity sides differ in length");
        Identity::new(id, reference, lhs.iter().zip(rhs).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = Some(tol);
        self
    }

    pub fn is_procedural(&self) -> bool {
        self.residuals.iter().any(Expr::is_procedural)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityResult {
    pub id: String,
    pub reference: String,
    pub max_residual: f64,
    pub worst_point: Vec<f64>,
    pub points: usize,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub seed: u64,
    pub points: usize,
    pub tolerance: f64,
    pub results: Vec<IdentityResult>,
}

impl CheckReport {
    pub fn empty(opts: &CheckOptions) -> Self {
        CheckReport { seed: opts.seed, points: opts.points, tolerance: opts.tol.unwrap_or(SYMBOLIC_TOL), results: vec![] }
    }

    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.tolerance = self.tolerance.max(other.tolerance);
        self.results.extend(other.results);
    }

    pub fn get(&self, id: &str) -> Option<&IdentityResult> {
        self.results.iter().find(|r| r.id == id)
    }
}

/// Seeded uniform sampler over a box.
pub struct Sampler {
    bounds: Vec<(f64, f64)>,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(space: Space, domain: &Domain, seed: u64) -> Result<Self> {
        Ok(Sampler { bounds: domain.bounds_for(space)?, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        self.bounds.iter().map(|&(lo, hi)| self.rng.random_range(lo..hi)).collect()
    }
}

/// Draws candidates in order, evaluates `f` on them in parallel, and keeps
/// the first `count` successes in candidate order. Gives up after
/// `10 * count` failures.
pub fn sample_map<T: Send>(
    sampler: &mut Sampler,
    count: usize,
    f: impl Fn(&[f64]) -> Result<T, EvalError> + Sync,
) -> Result<Vec<(Vec<f64>, T)>> {
    let mut accepted = Vec::with_capacity(count);
    let mut rejected = 0usize;
    let limit = 10 * count.max(1);
    while accepted.len() < count {
        let batch: Vec<Vec<f64>> = (0..(count - accepted.len()).max(8)).map(|_| sampler.next_point()).collect();
        let results: Vec<_> = batch.into_par_iter().map(|x| (f(&x), x)).collect();
        for (r, x) in results {
            if accepted.len() == count {
                break;
            }
            match r {
                Ok(v) => accepted.push((x, v)),
                Err(_) => {
                    rejected += 1;
                    if rejected >= limit {
                        return Err(Error::SamplingExhausted { accepted: accepted.len(), rejected });
                    }
                }
            }
        }
    }
    Ok(accepted)
}

/// Identities on one chart, optionally sampled in another chart and carried
/// over by a coordinate change.
pub struct CheckPlan<'a> {
    pub space: Space,
    pub identities: Vec<Identity>,
    /// When set, points are drawn in the old chart and mapped forward before
    /// evaluation.
    pub map: Option<&'a ChartMap>,
}

impl<'a> CheckPlan<'a> {
    pub fn new(space: Space, identities: Vec<Identity>) -> Self {
        CheckPlan { space, identities, map: None }
    }

    pub fn through(mut self, map: &'a ChartMap) -> Self {
        self.map = Some(map);
        self
    }

    pub fn is_procedural(&self) -> bool {
        self.identities.iter().any(Identity::is_procedural)
    }
}

pub fn run_check(plan: &CheckPlan<'_>, opts: &CheckOptions) -> Result<CheckReport> {
    let default_tol = opts.tol.unwrap_or(if plan.is_procedural() { PROCEDURAL_TOL } else { SYMBOLIC_TOL });
    let mut sampler = Sampler::new(plan.space, &opts.domain, opts.seed)?;
    let all: Vec<Expr> = plan.identities.iter().flat_map(|i| i.residuals.iter().cloned()).collect();
    let base_dim = plan.space.base_space().dim();
    let samples = sample_map(&mut sampler, opts.points, |x| {
        let y = match plan.map {
            Some(m) => m.map_point(x)?,
            None => x.to_vec(),
        };
        let vals = with_seed_hint(&x[..base_dim], || EvalCtx::new(plan.space, &y)?.eval_all(&all))?;
        Ok((y, vals))
    })?;
    let mut results = Vec::with_capacity(plan.identities.len());
    let mut offset = 0;
    for ident in &plan.identities {
        let k = ident.residuals.len();
        let mut max = 0.0f64;
        let mut worst = samples.first().map(|(_, (y, _))| y.clone()).unwrap_or_default();
        for (_, (y, vals)) in &samples {
            let r = vals[offset..offset + k].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if r > max {
                max = r;
                worst = y.clone();
            }
        }
        offset += k;
        let tolerance = ident.tol.unwrap_or(default_tol);
        results.push(IdentityResult {
            id: ident.id.clone(),
            reference: ident.reference.clone(),
            max_residual: max,
            worst_point: worst,
            points: samples.len(),
            tolerance,
            pass: max < tolerance,
        });
    }
    Ok(CheckReport { seed: opts.seed, points: opts.points, tolerance: default_tol, results })
}

/// Maximum absolute value of `exprs` over seeded points of `space`.
pub fn max_abs(space: Space, exprs: &[Expr], opts: &CheckOptions) -> Result<(f64, Vec<f64>)> {
    let plan = CheckPlan::new(space, vec![Identity::new("max", "", exprs.to_vec())]);
    let r = run_check(&plan, opts)?.results.remove(0);
    Ok((r.max_residual, r.worst_point))
}
