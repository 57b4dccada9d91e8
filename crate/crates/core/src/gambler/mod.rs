//! Seeded simulation of the betting process and of the objects derived from
//! it: the normalized wealth `Y`, the partial sums of `S`, the block
//! decomposition `S = sum A_i 2^-i`, binary digit windows of `S`, the
//! monotone coupling in `p`, and the variant with a general bet ratio.
//!
//! Every Monte Carlo driver gives sample `i` its own ChaCha8 stream
//! `(seed, i)`, so results do not depend on the rayon worker count.

mod blocks;
mod coupling;
mod digits;
mod generalized;
mod mc;
mod path;
mod rng;

pub use blocks::{blocks_from_xi, sample_blocks, BlockSample, BlockWalker, DEFAULT_BLOCK_STEP_CAP};
pub use coupling::{coupled_pair, coupled_run, CouplingSummary};
pub use digits::{
    digit_of, digit_sample, window_sample, z_chain, z_chain_from_blocks, DigitOutcome, DigitSettings, ZChain,
};
pub use generalized::{generalized_run, threshold_scan, GenConfig, GenOutcome, ScanRow};
pub use mc::{
    doom_then_ruin, mc_eventual, mc_ruin_by_n, DoomRuinSummary, EventualSummary, McEstimate,
};
pub use path::{
    run_path, trace_csv, trace_path, verify_closed_form, verify_path_identities, PathOutcome,
    PathState, RunOptions, TraceRow, Xi,
};
pub use rng::StreamRng;

use crate::exactnum::ExactError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GamblerError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("step on a ruined path")]
    AlreadyRuined,
    #[error("block {block} not completed within {cap} steps")]
    BlockCap { block: usize, cap: u64 },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<(), GamblerError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(GamblerError::InvalidArgument(format!("{name} must lie in [0,1], got {p}")))
    }
}
