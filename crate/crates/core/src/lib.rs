//! Symbolic-numeric tensor calculus on a time-dependent configuration
//! bundle `E → ℝ` and its phase space, with the lifts, Poisson-Nijenhuis
//! machinery and pointwise identity checking built on top.

pub mod check;
pub mod error;
pub mod expr;
pub mod field;
pub mod geometry;
pub mod identities;
pub mod lifts;
pub mod pn;
pub mod space;

pub use error::{EigenError, Error, EvalError, Result};
pub use expr::{parse_expr, EvalCtx, Expr, Procedural};
pub use field::{Backend, ScalarField};
pub use space::{Coord, Space, SpaceKind};
