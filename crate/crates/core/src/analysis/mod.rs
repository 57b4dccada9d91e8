//! Numerical experiments on top of the engines and the simulator: plateau
//! estimates of `f`, the local exponent at `x = 2+`, sandwich bounds, digit
//! statistics of `S`, monotonicity in `p` and convergence in `n`.
//!
//! Every report is a plain serializable value; [`Report`] wraps one with the
//! schema version and the configuration that produced it.

mod convergence;
mod digits;
mod holder;
mod monotonicity;
mod plateau;
mod residual;
mod sandwich;

pub use convergence::{
    convergence_report, gap_decay, modulus_check, ConvergenceReport, ConvergenceRow, GapDecay, ModulusReport,
    ModulusRow,
};
pub use digits::{chi_square_uniform, digit_report, tv_from_uniform, DigitConfig, DigitHistogram, ZeroWindowCheck};
pub use holder::{holder_exponent, holder_target, ExponentFit};
pub use monotonicity::{monotonicity_report, uniform_p_grid, MonotonicityReport, MonotonicityRow};
pub use plateau::{plateau_estimate_exact, plateau_estimate_f, plateau_estimates, PlateauEstimate, PlateauSettings};
pub use residual::{residual_grid, ResidualRow};
pub use sandwich::{sandwich_check, sandwich_sweep, SandwichCheck};

use serde::{Deserialize, Serialize};

use crate::gambler::GamblerError;
use crate::ruinrec::RecError;
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("no plateau at x = {x}, p = {p}: gap {gap} >= {tolerance} at n = {n}")]
    NonConvergent {
        x: f64,
        p: f64,
        gap: f64,
        n: u32,
        tolerance: f64,
    },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Rec(#[from] RecError),
    #[error(transparent)]
    Gambler(#[from] GamblerError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<C, T> {
    pub schema_version: u32,
    pub config: C,
    pub result: T,
}

impl<C, T> Report<C, T> {
    pub fn new(config: C, result: T) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            config,
            result,
        }
    }
}
