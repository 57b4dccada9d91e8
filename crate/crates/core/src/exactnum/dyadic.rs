use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ExactError;

/// Exponents beyond this magnitude are treated as a runaway computation.
pub const DEFAULT_EXPONENT_LIMIT: i64 = 4096;

/// An exact number `mantissa * 2^exponent`.
///
/// Values are always kept in canonical form: the mantissa is odd, or the
/// value is zero and both fields are zero. Equality and hashing therefore
/// coincide with numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    mantissa: BigInt,
    exponent: i64,
}

impl DyadicRational {
    pub fn new(mantissa: impl Into<BigInt>, exponent: i64) -> Self {
        Self::canonical(mantissa.into(), exponent)
    }

    fn canonical(mut mantissa: BigInt, mut exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Self::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            mantissa >>= tz;
            exponent += tz as i64;
        }
        DyadicRational { mantissa, exponent }
    }

    pub fn zero() -> Self {
        DyadicRational {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Self::canonical(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::canonical(v, 0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        DyadicRational {
            mantissa: BigInt::one(),
            exponent: k,
        }
    }

    /// Exact conversion from a finite double.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Self::zero());
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0x000f_ffff_ffff_ffff;
        let (m, e) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        Some(Self::canonical(BigInt::from(m) * sign, e))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Whether the value is an integer.
    pub fn is_integer(&self) -> bool {
        self.exponent >= 0
    }

    /// Multiplies by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        DyadicRational {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    pub fn half(&self) -> Self {
        self.mul_pow2(-1)
    }

    pub fn double(&self) -> Self {
        self.mul_pow2(1)
    }

    /// `floor(self * 2^k)`.
    pub fn floor_mul_pow2(&self, k: i64) -> BigInt {
        let e = self.exponent + k;
        if e >= 0 {
            &self.mantissa << (e as usize)
        } else {
            // arithmetic shift floors for negative values as well
            &self.mantissa >> ((-e) as usize)
        }
    }

    pub fn floor(&self) -> BigInt {
        self.floor_mul_pow2(0)
    }

    /// Hard error if the exponent has drifted past `limit` in magnitude.
    pub fn check_exponent(&self, limit: i64) -> Result<(), ExactError> {
        if self.exponent.abs() > limit {
            Err(ExactError::ExponentOverflow {
                exponent: self.exponent,
                limit,
            })
        } else {
            Ok(())
        }
    }

    /// Nearest double (mantissas beyond 64 bits are truncated first).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits() as i64;
        let (m, e) = if bits > 64 {
            let shift = bits - 64;
            (&self.mantissa >> (shift as usize), self.exponent + shift)
        } else {
            (self.mantissa.clone(), self.exponent)
        };
        let m = m.to_i128().expect("mantissa fits in 65 bits") as f64;
        ldexp(m, e)
    }

    /// Exact decimal expansion, truncated after `max_frac_digits` fractional
    /// digits. Truncated output carries a trailing `...`.
    pub fn to_decimal(&self, max_frac_digits: usize) -> String {
        if self.exponent >= 0 {
            return (&self.mantissa << (self.exponent as usize)).to_string();
        }
        let neg = self.mantissa.is_negative();
        let mag = self.mantissa.abs();
        let shift = (-self.exponent) as usize;
        let int_part = &mag >> shift;
        let frac_mask = (BigInt::one() << shift) - 1u32;
        let mut frac = &mag & &frac_mask;
        let mut digits = String::new();
        // a dyadic with 2^-shift has exactly `shift` fractional decimal digits
        let mut truncated = false;
        while !frac.is_zero() {
            if digits.len() == max_frac_digits {
                truncated = true;
                break;
            }
            frac *= 10u32;
            let d = &frac >> shift;
            frac = &frac & &frac_mask;
            digits.push(char::from(b'0' + d.to_u8().unwrap_or(0)));
        }
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&int_part.to_string());
        if !digits.is_empty() {
            out.push('.');
            out.push_str(&digits);
        }
        if truncated {
            out.push_str("...");
        }
        out
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt) {
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << ((self.exponent - e) as usize);
        let b = &other.mantissa << ((other.exponent - e) as usize);
        (a, b)
    }

    /// Position just above the most significant bit, `floor(log2|v|) + 1`.
    fn magnitude(&self) -> i64 {
        self.mantissa.bits() as i64 + self.exponent
    }
}

/// `m * 2^e` for a double `m`, without intermediate overflow.
pub(crate) fn ldexp(mut m: f64, mut e: i64) -> f64 {
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
        if m.is_infinite() {
            return m;
        }
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
        if m == 0.0 {
            return m;
        }
    }
    m * 2f64.powi(e as i32)
}

impl Default for DyadicRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for DyadicRational {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let (ma, mb) = (self.magnitude(), other.magnitude());
        if ma != mb {
            let ord = ma.cmp(&mb);
            return if sa > 0 { ord } else { ord.reverse() };
        }
        let (a, b) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<&DyadicRational> for &DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: &DyadicRational) -> DyadicRational {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(rhs.exponent);
        let (a, b) = self.aligned(rhs);
        DyadicRational::canonical(a + b, e)
    }
}

impl Sub<&DyadicRational> for &DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: &DyadicRational) -> DyadicRational {
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(rhs.exponent);
        let (a, b) = self.aligned(rhs);
        DyadicRational::canonical(a - b, e)
    }
}

impl Mul<&DyadicRational> for &DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: &DyadicRational) -> DyadicRational {
        if self.is_zero() || rhs.is_zero() {
            return DyadicRational::zero();
        }
        // product of odd mantissas is odd
        DyadicRational {
            mantissa: &self.mantissa * &rhs.mantissa,
            exponent: self.exponent + rhs.exponent,
        }
    }
}

impl Neg for &DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        DyadicRational {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<DyadicRational> for DyadicRational {
            type Output = DyadicRational;
            fn $m(self, rhs: DyadicRational) -> DyadicRational {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&DyadicRational> for DyadicRational {
            type Output = DyadicRational;
            fn $m(self, rhs: &DyadicRational) -> DyadicRational {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        -&self
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl fmt::Debug for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self, self.to_decimal(20))
    }
}

impl FromStr for DyadicRational {
    type Err = ExactError;

    /// Accepts the serialized form `m*2^e`, integers, finite decimals
    /// (`2.25`) and fractions with a power-of-two denominator (`9/4`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ExactError::Parse(format!("not a dyadic rational: {s:?}"));
        if let Some((m, e)) = s.split_once("*2^") {
            let m: BigInt = m.trim().parse().map_err(|_| bad())?;
            let e: i64 = e.trim().parse().map_err(|_| bad())?;
            return Ok(Self::new(m, e));
        }
        let r = super::parse_rational(s).map_err(|_| bad())?;
        super::rational_to_dyadic(&r).ok_or_else(bad)
    }
}

impl serde::Serialize for DyadicRational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for DyadicRational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> DyadicRational {
        s.parse().unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(&d("1/2") + &d("3/4"), d("5/4"));
        assert_eq!(&DyadicRational::zero() + &d("7/8"), d("7/8"));
        assert_eq!(
            &DyadicRational::new(-3, -1) + &DyadicRational::new(3, -1),
            DyadicRational::zero()
        );
    }

    #[test]
    fn canonical_form() {
        let v = DyadicRational::new(12, 0);
        assert_eq!(v.mantissa(), &BigInt::from(3));
        assert_eq!(v.exponent(), 2);
        let z = DyadicRational::new(0, 17);
        assert_eq!(z.exponent(), 0);
        assert_eq!(v.to_string(), "3*2^2");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(d("5*2^-2"), d("1.25"));
        assert_eq!(d("9/4"), d("2.25"));
        assert_eq!(d("-3"), DyadicRational::from_int(-3));
        assert!("1/3".parse::<DyadicRational>().is_err());
        assert!("abc".parse::<DyadicRational>().is_err());
    }

    #[test]
    fn ordering_mixed_signs_and_scales() {
        let mut v = vec![d("3"), d("-1/4"), d("1/1024"), d("-7"), d("0"), d("2.5")];
        v.sort();
        let s: Vec<String> = v.iter().map(|x| x.to_decimal(10)).collect();
        assert_eq!(s, ["-7", "-0.25", "0", "0.0009765625", "2.5", "3"]);
    }

    #[test]
    fn decimal_truncation_is_marked() {
        assert_eq!(d("5/4").to_decimal(2), "1.25");
        assert_eq!(d("5/4").to_decimal(1), "1.2...");
        assert_eq!(d("-3/8").to_decimal(5), "-0.375");
    }

    #[test]
    fn floor_of_negative() {
        assert_eq!(d("-3/2").floor(), BigInt::from(-2));
        assert_eq!(d("7/4").floor_mul_pow2(2), BigInt::from(7));
    }

    #[test]
    fn exponent_cap() {
        let v = DyadicRational::pow2(-5000);
        assert!(v.check_exponent(DEFAULT_EXPONENT_LIMIT).is_err());
        assert!(d("3").check_exponent(DEFAULT_EXPONENT_LIMIT).is_ok());
    }

    #[test]
    fn float_round_trip() {
        for v in [0.1, -2.75, 1e300, 5e-324, 3.0] {
            assert_eq!(DyadicRational::from_f64(v).unwrap().to_f64(), v);
        }
        assert!(DyadicRational::from_f64(f64::NAN).is_none());
    }
}
