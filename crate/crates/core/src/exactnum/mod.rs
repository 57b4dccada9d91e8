//! Exact arithmetic: dyadic rationals for every x-coordinate, bet and wealth
//! value, big rationals for probabilities and polynomial coefficients, and
//! the affine maps that drive the recursion.

mod dyadic;
mod maps;
mod rational;

pub use dyadic::{DyadicRational, DEFAULT_EXPONENT_LIMIT};
pub use maps::{map_lose, map_win, premap_lose, premap_win};
pub use rational::{
    dyadic_to_rational, format_rational, parse_rational, rational_from_f64, rational_to_decimal,
    rational_to_dyadic, rational_to_f64, BigRational,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("exponent {exponent} exceeds the limit of {limit}")]
    ExponentOverflow { exponent: i64, limit: i64 },
    #[error("parse error: {0}")]
    Parse(String),
}
