mod calculus;
mod newton;
mod tensors;
mod transform;

pub use calculus::{
    differential, exterior_derivative, haantjes_tensor, hook2, interior_product, lie_bracket, lie_derivative,
    nijenhuis_torsion, LieDerivative,
};
pub use newton::with_seed_hint;
pub use tensors::{Bivector, Components, OneForm, Tensor11, Tensor12, TwoForm, VectorField};
pub use transform::{transform, ChartMap, Direction, FibredTransform, Transformable, JACOBIAN_GUARD};
