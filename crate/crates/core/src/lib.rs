//! Computational toolkit for the ruin probability `f(x, p)` of a gambler who
//! starts with fortune `x`, bets one unit, doubles the bet after every win
//! and halves it after every loss, winning each round with probability `p`.
//!
//! * [`exactnum`]: exact dyadic and rational arithmetic.
//! * [`ruinrec`]: exact engines for the approximants `f_n`.
//! * [`gambler`]: seeded, deterministic-parallel simulation of the process.
//! * [`analysis`]: plateau estimates, exponent fits, bound checks and
//!   distributional diagnostics built on the two layers above.

/// Version of every serialized report and cache record.
pub const SCHEMA_VERSION: u32 = 1;

pub mod analysis;
pub mod exactnum;
pub mod gambler;
pub mod ruinrec;
