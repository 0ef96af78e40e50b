use crate::error::Result;
use crate::expr::Expr;
use crate::field::ScalarField;

use super::tensors::{same_space, Components, OneForm, Tensor11, Tensor12, TwoForm, VectorField};

/// `[X, Y]^a = X(Y^a) - Y(X^a)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    same_space(x.space(), y.space())?;
    let d = x.space().dim();
    let comps = (0..d)
        .map(|a| x.derivative_of(y.component(a)).sub(&y.derivative_of(x.component(a))))
        .collect();
    VectorField::new(x.space(), comps)
}

/// Lie derivative along a vector field, producing an object of the same kind.
pub trait LieDerivative: Sized {
    fn lie_derivative(&self, x: &VectorField) -> Result<Self>;
}

pub fn lie_derivative<T: LieDerivative>(x: &VectorField, t: &T) -> Result<T> {
    t.lie_derivative(x)
}

impl LieDerivative for ScalarField {
    fn lie_derivative(&self, x: &VectorField) -> Result<Self> {
        same_space(self.space(), x.space())?;
        ScalarField::new(self.space(), x.derivative_of(self.expr()))
    }
}

impl LieDerivative for VectorField {
    fn lie_derivative(&self, x: &VectorField) -> Result<Self> {
        lie_bracket(x, self)
    }
}

impl LieDerivative for OneForm {
    /// `(L_X α)_b = X(α_b) + α_a ∂_b X^a`.
    fn lie_derivative(&self, x: &VectorField) -> Result<Self> {
        same_space(self.space(), x.space())?;
        let s = self.space();
        let coords = s.coords();
        let comps = coords
            .iter()
            .enumerate()
            .map(|(b, &cb)| {
                let tail = (0..s.dim()).map(|a| self.component(a).mul(&x.component(a).diff(cb)));
                x.derivative_of(self.component(b)).add(&Expr::sum(tail))
            })
            .collect();
        OneForm::new(s, comps)
    }
}

impl LieDerivative for Tensor11 {
    /// `(L_X R)^a_b = X(R^a_b) - R^c_b ∂_c X^a + R^a_c ∂_b X^c`.
    fn lie_derivative(&self, x: &VectorField) -> Result<Self> {
        same_space(self.space(), x.space())?;
        let s = self.space();
        let d = s.dim();
        let coords = s.coords();
        // ∂_c X^a, indexed [a][c]
        let dx: Vec<Vec<Expr>> =
            (0..d).map(|a| coords.iter().map(|&c| x.component(a).diff(c)).collect()).collect();
        Ok(Tensor11::from_fn(s, |a, b| {
            let minus = Expr::sum((0..d).map(|c| self.entry(c, b).mul(&dx[a][c])));
            let plus = Expr::sum((0..d).map(|c| self.entry(a, c).mul(&dx[c][b])));
            x.derivative_of(self.entry(a, b)).sub(&minus).add(&plus)
        }))
    }
}

impl LieDerivative for TwoForm {
    /// `(L_X ω)_ab = X(ω_ab) + ω_cb ∂_a X^c + ω_ac ∂_b X^c`.
    fn lie_derivative(&self, x: &VectorField) -> Result<Self> {
        same_space(self.space(), x.space())?;
        let s = self.space();
        let d = s.dim();
        let coords = s.coords();
        let dx: Vec<Vec<Expr>> =
            (0..d).map(|c| coords.iter().map(|&a| x.component(c).diff(a)).collect()).collect();
        Ok(TwoForm::from_fn(s, |a, b| {
            let left = Expr::sum((0..d).map(|c| self.entry(c, b).mul(&dx[c][a])));
            let right = Expr::sum((0..d).map(|c| self.entry(a, c).mul(&dx[c][b])));
            x.derivative_of(self.entry(a, b)).add(&left).add(&right)
        }))
    }
}

/// `(dα)_ab = ∂_a α_b - ∂_b α_a`.
pub fn exterior_derivative(alpha: &OneForm) -> TwoForm {
    let s = alpha.space();
    let coords = s.coords();
    TwoForm::from_fn(s, |a, b| {
        if a == b {
            Expr::zero()
        } else {
            alpha.component(b).diff(coords[a]).sub(&alpha.component(a).diff(coords[b]))
        }
    })
}

/// `df` of a scalar field.
pub fn differential(f: &ScalarField) -> OneForm {
    OneForm::differential(f.space(), f.expr())
}

/// `i_X ω`.
pub fn interior_product(x: &VectorField, omega: &TwoForm) -> Result<OneForm> {
    omega.interior(x)
}

/// `(R ⌟₂ ω)(X, Y) = ω(R X, Y)`, i.e. `B_ab = R^c_a ω_cb`. Not
/// antisymmetric in general.
pub fn hook2(r: &Tensor11, omega: &TwoForm) -> Result<TwoForm> {
    same_space(r.space(), omega.space())?;
    let d = r.dim();
    Ok(TwoForm::from_fn(r.space(), |a, b| {
        Expr::sum((0..d).map(|c| r.entry(c, a).mul(omega.entry(c, b))))
    }))
}

/// Nijenhuis torsion
/// `N(X, Y) = [RX, RY] - R[RX, Y] - R[X, RY] + R²[X, Y]`
/// in components
/// `N^a_bc = R^d_b ∂_d R^a_c - R^d_c ∂_d R^a_b - R^a_d (∂_b R^d_c - ∂_c R^d_b)`.
pub fn nijenhuis_torsion(r: &Tensor11) -> Tensor12 {
    let s = r.space();
    let d = s.dim();
    let coords = s.coords();
    // ∂_e R^a_b, indexed [e][a*d+b]
    let dr: Vec<Vec<Expr>> = coords
        .iter()
        .map(|&e| (0..d * d).map(|k| r.entry(k / d, k % d).diff(e)).collect())
        .collect();
    let at = |e: usize, a: usize, b: usize| &dr[e][a * d + b];
    Tensor12::from_fn(s, |a, b, c| {
        if b == c {
            return Expr::zero();
        }
        let t1 = Expr::sum((0..d).map(|e| r.entry(e, b).mul(at(e, a, c))));
        let t2 = Expr::sum((0..d).map(|e| r.entry(e, c).mul(at(e, a, b))));
        let t3 = Expr::sum((0..d).map(|e| r.entry(a, e).mul(&at(b, e, c).sub(at(c, e, b)))));
        t1.sub(&t2).sub(&t3)
    })
}

/// Haantjes tensor
/// `H(X, Y) = R² N(X, Y) + N(RX, RY) - R N(RX, Y) - R N(X, RY)`.
pub fn haantjes_tensor(r: &Tensor11) -> Tensor12 {
    let n = nijenhuis_torsion(r);
    let r2 = r.square();
    let s = r.space();
    let d = s.dim();
    // N^a_{e c} R^e_b  and  N^a_{b e} R^e_c
    let n_rb = Tensor12::from_fn(s, |a, b, c| Expr::sum((0..d).map(|e| n.entry(a, e, c).mul(r.entry(e, b)))));
    let n_rc = Tensor12::from_fn(s, |a, b, c| Expr::sum((0..d).map(|e| n.entry(a, b, e).mul(r.entry(e, c)))));
    Tensor12::from_fn(s, |a, b, c| {
        if b == c {
            return Expr::zero();
        }
        let t1 = Expr::sum((0..d).map(|e| r2.entry(a, e).mul(n.entry(e, b, c))));
        let t2 = Expr::sum((0..d).map(|e| n_rb.entry(a, b, e).mul(r.entry(e, c))));
        let t3 = Expr::sum((0..d).map(|e| r.entry(a, e).mul(n_rb.entry(e, b, c))));
        let t4 = Expr::sum((0..d).map(|e| r.entry(a, e).mul(n_rc.entry(e, b, c))));
        t1.add(&t2).sub(&t3).sub(&t4)
    })
}
