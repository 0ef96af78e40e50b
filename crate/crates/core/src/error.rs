use thiserror::Error;

use crate::space::{Coord, Space};

/// Failures while evaluating a field at a point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("singular point: denominator magnitude {0:e} below guard")]
    Singular(f64),
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("derivative order {0} exceeds the procedural limit of 2")]
    OrderOverflow(usize),
    #[error("point has dimension {got}, chart has dimension {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("coordinate {0} is not part of the chart")]
    UnknownCoord(Coord),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("inverse map failed: {0}")]
    Inverse(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("complex eigenvalue {re} ± {im}i")]
    Complex { re: f64, im: f64 },
    #[error("eigenvalues {0} and {1} are not separated by more than the distinctness threshold")]
    Clustered(f64, f64),
    #[error("defective block: left/right eigenvectors for eigenvalue {0} are orthogonal")]
    Defective(f64),
    #[error("block reconstruction residual {0:e} too large")]
    Reconstruction(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at {pos} for chart {space}")]
    UnknownIdentifier { name: String, pos: usize, space: Space },
    #[error("non-constant exponent at {pos}")]
    NonConstantExponent { pos: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("space mismatch: expected {expected}, got {got}")]
    SpaceMismatch { expected: Space, got: Space },
    #[error("{0}")]
    WrongSpace(String),
    #[error("vector field is not vertical (dt-component is not identically zero)")]
    NotVertical,
    #[error("vector field is neither vertical nor t-normalized")]
    NotVerticalOrTimeNormalized,
    #[error("tensor does not annihilate dt")]
    DtNotAnnihilated,
    #[error("derivative order {0} exceeds the procedural limit of 2")]
    OrderOverflow(usize),
    #[error("singular Jacobian at {0:?}")]
    SingularJacobian(Vec<f64>),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("Nijenhuis torsion is nonzero (max residual {0:e})")]
    TorsionNonzero(f64),
    #[error("eigenvalues are not functionally independent at {0:?}")]
    DegenerateJacobian(Vec<f64>),
    #[error("P and the complete lift do not commute (residual {0:e})")]
    CommutationFailure(f64),
    #[error("eigenvalue ordering changed between {0:?} and {1:?}")]
    EigenvalueCrossing(Vec<f64>, Vec<f64>),
    #[error("missing object: {0}")]
    MissingObject(String),
    #[error("sampling exhausted: {accepted} points accepted after {rejected} rejections")]
    SamplingExhausted { accepted: usize, rejected: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
