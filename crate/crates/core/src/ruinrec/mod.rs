//! Exact engines for the approximants `f_n` of the ruin probability:
//! a step-function engine in `x`, a memoized pointwise engine, an exact
//! polynomial engine in `p`, and a forward engine for the increments
//! `f_{n+1} - f_n`.
//!
//! Every engine runs either in exact mode (rational `p`, rational values) or
//! in fast mode (double `p` and values); the mode follows from the value
//! type the caller instantiates it with.

mod bracket;
mod pointwise;
mod poly;
mod profile;
mod step;
mod value;

pub use bracket::{grid_profiles, BracketProfile, GridBracket, GridConfig};
pub use pointwise::{pointwise_fn, poly_fn, MemoTable, PointwiseEngine, DEFAULT_MEMO_BUDGET};
pub use poly::PolyP;
pub use profile::{cumulative, doom_profile, gap_sequence, tail_ratio, DEFAULT_STATE_BUDGET};
pub use step::{
    eval_step, iterate_step, iterate_step_with, refine_step, sup_diff, sup_diff_steps,
    StepFunction, StepRecord, DEFAULT_BREAKPOINT_BUDGET,
};
pub use value::{Probability, Ring, ValueMode};

use crate::exactnum::ExactError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecError {
    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),
    #[error("{what} budget of {limit} exceeded")]
    BudgetExceeded { what: &'static str, limit: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}
