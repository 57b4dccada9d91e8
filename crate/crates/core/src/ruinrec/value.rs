use std::fmt::Debug;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactnum::{format_rational, parse_rational, rational_to_f64, BigRational};

use super::PolyP;

/// The arithmetic the recursion engines need. Implemented for doubles,
/// exact rationals and polynomials in `p`.
pub trait Ring: Clone + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn is_zero(&self) -> bool;

    /// `1 - self`
    fn complement(&self) -> Self {
        Self::one().sub(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueMode {
    Exact,
    Double,
}

/// Ordered, probability-valued scalars (exact or double).
pub trait Probability: Ring + PartialOrd + PartialEq {
    const MODE: ValueMode;

    fn to_f64(&self) -> f64;

    /// Serialized form: `n/d` for exact values, shortest round-trip decimal
    /// for doubles.
    fn encode(&self) -> String;

    fn decode(s: &str) -> Option<Self>;

    /// Converts an exact probability into this representation.
    fn from_rational(r: &BigRational) -> Self;
}

impl Ring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Probability for f64 {
    const MODE: ValueMode = ValueMode::Double;

    fn to_f64(&self) -> f64 {
        *self
    }
    fn encode(&self) -> String {
        format!("{self:?}")
    }
    fn decode(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
    fn from_rational(r: &BigRational) -> Self {
        rational_to_f64(r)
    }
}

impl Ring for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Probability for BigRational {
    const MODE: ValueMode = ValueMode::Exact;

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn encode(&self) -> String {
        format_rational(self)
    }
    fn decode(s: &str) -> Option<Self> {
        if !s.contains('/') {
            return None;
        }
        parse_rational(s).ok()
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
}

impl Ring for PolyP {
    fn zero() -> Self {
        PolyP::constant(Zero::zero())
    }
    fn one() -> Self {
        PolyP::constant(One::one())
    }
    fn add(&self, rhs: &Self) -> Self {
        PolyP::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        PolyP::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        PolyP::mul(self, rhs)
    }
    fn is_zero(&self) -> bool {
        PolyP::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_encoding_round_trips() {
        for v in [0.3f64, 1.0, 0.0, 1.0 / 3.0, 5e-300] {
            assert_eq!(f64::decode(&v.encode()), Some(v));
        }
        assert_eq!(1.0f64.encode(), "1.0");
    }

    #[test]
    fn rational_encoding() {
        let r = BigRational::new(3.into(), 10.into());
        assert_eq!(r.encode(), "3/10");
        assert_eq!(BigRational::decode("3/10"), Some(r));
        assert_eq!(BigRational::decode("0.3"), None);
    }
}
