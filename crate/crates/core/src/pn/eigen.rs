//! Pointwise eigen-decomposition of the `q`-block of a (1,1) tensor on
//! `BaseE(n)`, and the eigenvalues as procedural scalar fields.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;

use crate::error::{EigenError, EvalError, Result};
use crate::expr::{EvalCtx, Expr, Procedural};
use crate::geometry::{Components, Tensor11};
use crate::space::{Space, SpaceKind};
use crate::Error;

/// Eigenvalues closer than this (to each other or to `λ₀ = 0`) are
/// treated as colliding.
pub const DISTINCT_GAP: f64 = 1e-8;
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
const IMAG_TOL: f64 = 1e-10;
const CACHE_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenData {
    pub point: Vec<f64>,
    /// `λ₁ < … < λₙ` of the block `(R^i_j)`.
    pub eigenvalues: Vec<f64>,
    /// The eigenvalue of the eigenform `dt`.
    pub lambda0: f64,
    /// Column `i` is the right eigenvector for `λ_i`.
    pub right: DMatrix<f64>,
    /// Column `i` is the left eigenvector for `λ_i`, scaled so that
    /// `leftᵀ right = I`.
    pub left: DMatrix<f64>,
}

/// Ascending eigenvalues with right and left eigenvector matrices.
pub type Decomposition = (Vec<f64>, DMatrix<f64>, DMatrix<f64>);

/// Decomposes a real matrix with simple real spectrum.
pub fn decompose(a: &DMatrix<f64>) -> Result<Decomposition, EigenError> {
    let n = a.nrows();
    let scale = a.amax().max(1.0);
    let mut lambdas = Vec::with_capacity(n);
    for z in a.complex_eigenvalues().iter() {
        if z.im.abs() > IMAG_TOL * scale {
            return Err(EigenError::Complex { re: z.re, im: z.im });
        }
        lambdas.push(z.re);
    }
    lambdas.sort_by(f64::total_cmp);
    let mut prev = 0.0;
    for &l in &lambdas {
        if (l - prev).abs() <= DISTINCT_GAP {
            return Err(EigenError::Clustered(prev, l));
        }
        prev = l;
    }
    let mut right = DMatrix::zeros(n, n);
    let mut left = DMatrix::zeros(n, n);
    for (i, &l) in lambdas.iter().enumerate() {
        let shifted = a - DMatrix::identity(n, n) * l;
        let v = null_vector(&shifted);
        let u = null_vector(&shifted.transpose());
        let uv = u.dot(&v);
        if uv.abs() < 1e-10 {
            return Err(EigenError::Defective(l));
        }
        right.set_column(i, &v);
        left.set_column(i, &(u / uv));
    }
    let recon = &right * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(lambdas.clone())) * left.transpose();
    let residual = (a - recon).amax();
    if residual > RECONSTRUCTION_TOL * scale {
        return Err(EigenError::Reconstruction(residual));
    }
    Ok((lambdas, right, left))
}

/// Unit vector spanning the numerical kernel (smallest singular direction).
fn null_vector(m: &DMatrix<f64>) -> nalgebra::DVector<f64> {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested");
    let k = svd.singular_values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap();
    vt.row(k).transpose()
}

/// Block entries `R^i_j` and their partial derivatives along every base
/// coordinate, shared by all eigenvalue fields of one tensor.
pub(crate) struct EigenSystem {
    n: usize,
    block: Vec<Expr>,
    /// `[k][i*n+j] = ∂R^i_j/∂x^k`.
    dblock: Vec<Vec<Expr>>,
    cache: Mutex<HashMap<Vec<u64>, Arc<EigenData>>>,
}

impl fmt::Debug for EigenSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EigenSystem").field("block", &self.block).finish()
    }
}

impl EigenSystem {
    pub(crate) fn new(r: &Tensor11) -> Result<Self> {
        let s = r.space();
        if s.kind != SpaceKind::BaseE {
            return Err(Error::WrongSpace(format!("eigen-analysis needs a tensor on BaseE, got {s}")));
        }
        r.require_annihilates_dt()?;
        let n = s.n;
        let block: Vec<Expr> = (0..n * n).map(|k| r.entry(k / n + 1, k % n + 1).clone()).collect();
        let dblock = s.coords().into_iter().map(|c| block.iter().map(|e| e.diff(c)).collect()).collect();
        Ok(EigenSystem { n, block, dblock, cache: Mutex::new(HashMap::new()) })
    }

    pub(crate) fn analyse(&self, x: &[f64]) -> Result<Arc<EigenData>, EvalError> {
        let key: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
        if let Some(d) = self.cache.lock().unwrap().get(&key) {
            return Ok(d.clone());
        }
        let n = self.n;
        let vals = EvalCtx::new(Space::base(n), x)?.eval_all(&self.block)?;
        let (eigenvalues, right, left) = decompose(&DMatrix::from_row_slice(n, n, &vals))?;
        let data = Arc::new(EigenData { point: x.to_vec(), eigenvalues, lambda0: 0.0, right, left });
        let mut cache = self.cache.lock().unwrap();
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, data.clone());
        Ok(data)
    }

    /// `∂λ_i/∂x^k = u_iᵀ (∂A/∂x^k) v_i`.
    fn gradient(&self, x: &[f64], i: usize) -> Result<Vec<f64>, EvalError> {
        let data = self.analyse(x)?;
        let n = self.n;
        let mut ctx = EvalCtx::new(Space::base(n), x)?;
        let (u, v) = (data.left.column(i), data.right.column(i));
        self.dblock
            .iter()
            .map(|d| {
                let m = DMatrix::from_row_slice(n, n, &ctx.eval_all(d)?);
                Ok(u.dot(&(m * v)))
            })
            .collect()
    }

    /// Eigenvalue fields `λ_1 < … < λ_n` as procedural expressions on
    /// `BaseE(n)`.
    pub(crate) fn eigenvalue_fields(self: &Arc<Self>) -> Vec<Expr> {
        let args: Vec<Expr> = Space::base(self.n).coords().into_iter().map(Expr::var).collect();
        (0..self.n)
            .map(|i| Expr::call(Arc::new(Eigenvalue { system: self.clone(), index: i }), args.clone()))
            .collect()
    }
}

#[derive(Debug)]
struct Eigenvalue {
    system: Arc<EigenSystem>,
    index: usize,
}

impl Procedural for Eigenvalue {
    fn name(&self) -> String {
        format!("lambda{}", self.index + 1)
    }

    fn arity(&self) -> usize {
        self.system.n + 1
    }

    fn value(&self, x: &[f64]) -> Result<f64, EvalError> {
        Ok(self.system.analyse(x)?.eigenvalues[self.index])
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.system.gradient(x, self.index)
    }
}

/// Eigen-decomposition of the `q`-block of `R` at a point of `BaseE(n)`.
pub fn eigen_analysis(r: &Tensor11, point: &[f64]) -> Result<EigenData> {
    Ok((*EigenSystem::new(r)?.analyse(point)?).clone())
}

/// The eigenvalues of `R` as procedural scalar fields on `BaseE(n)`, in
/// ascending order.
pub fn eigenvalue_fields(r: &Tensor11) -> Result<Vec<Expr>> {
    Ok(Arc::new(EigenSystem::new(r)?).eigenvalue_fields())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_spectrum() {
        let a = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 0.0, 5.0]);
        let (l, v, u) = decompose(&a).unwrap();
        assert!((l[0] - 3.0).abs() < 1e-14 && (l[1] - 5.0).abs() < 1e-14);
        let id = u.transpose() * &v;
        assert!((id - DMatrix::identity(2, 2)).amax() < 1e-14);
    }

    #[test]
    fn rejected_spectra() {
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(matches!(decompose(&rot), Err(EigenError::Complex { .. })));
        let id = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        assert!(matches!(decompose(&id), Err(EigenError::Clustered(..))));
        let jordan = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]);
        assert!(decompose(&jordan).is_err());
        let singular = DMatrix::from_row_slice(1, 1, &[0.0]);
        assert!(matches!(decompose(&singular), Err(EigenError::Clustered(..))));
    }
}
