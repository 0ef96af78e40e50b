//! Command-line front end: model loading, lifts, identity suites and the
//! Poisson-Nijenhuis / Darboux-Nijenhuis analyses.

pub mod commands;
pub mod error;
pub mod model;
pub mod render;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jetlift_core::check::{CheckOptions, Domain, DEFAULT_POINTS};

pub use commands::{run, Output};
pub use error::CliError;
pub use model::Model;

#[derive(Debug, Parser)]
#[command(name = "jetlift", version, about = "Lifts of tensor fields to the dual jet bundle and identity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Model file (JSON).
    #[arg(long)]
    pub model: PathBuf,
    /// Number of sample points.
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    pub points: usize,
    /// Pass threshold; defaults to 1e-9, or 1e-6 when procedural fields are involved.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampling box, "lo,hi" for every coordinate or "lo,hi;lo,hi;..." per coordinate.
    #[arg(long, default_value = "-2,2")]
    pub domain: String,
    /// Machine-readable output.
    #[arg(long)]
    pub json: bool,
}

impl Common {
    pub fn options(&self) -> Result<CheckOptions, CliError> {
        if self.points == 0 {
            return Err(CliError::Usage("--points must be positive".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Usage("--tol must be a positive number".into()));
            }
        }
        Ok(CheckOptions { points: self.points, seed: self.seed, tol: self.tol, domain: Domain::parse(&self.domain)? })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LiftKind {
    /// ᵛα, ᵛR or ᵛω.
    Vertical,
    /// X̃ or R̃.
    Complete,
    /// ʰR.
    Horizontal,
    /// F_X.
    Momentum,
    /// R̃ on the cotangent bundle of the base.
    Cotangent,
    /// X_h of a function on the phase space.
    Hamiltonian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PrintKind {
    Object,
    Torsion,
    Haantjes,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a lifted object.
    Lift {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        object: String,
        #[arg(long, value_enum)]
        kind: LiftKind,
    },
    /// Run identity suites over the objects of the model.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Build and check eigenvalue (Darboux-Nijenhuis) coordinates.
    Darboux {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        object: String,
        /// Also report the eigen-decomposition at this point, "t,q1,...".
        #[arg(long)]
        at: Option<String>,
    },
    /// Print an object, or its Nijenhuis / Haantjes tensor.
    Print {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        object: String,
        #[arg(long, value_enum, default_value = "object")]
        kind: PrintKind,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Lift { common, .. }
            | Command::Verify { common, .. }
            | Command::Darboux { common, .. }
            | Command::Print { common, .. } => common,
        }
    }
}
