use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{DyadicRational, ExactError};

pub type BigRational = num_rational::BigRational;

/// Parses `n/d`, an integer, or a finite decimal such as `0.3` (read exactly
/// as `3/10`).
pub fn parse_rational(s: &str) -> Result<BigRational, ExactError> {
    let s = s.trim();
    let bad = || ExactError::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.bytes().all(|c| c.is_ascii_digit())
        || !frac.bytes().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let d = num_traits::pow(BigInt::from(10u32), frac.len());
    let r = BigRational::new(n, d);
    Ok(if neg { -r } else { r })
}

/// Always renders as `n/d`, including integers (`1/1`).
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    // scale so that the quotient keeps ~64 significant bits
    let (n, d) = (r.numer(), r.denom());
    if n.is_zero() {
        return 0.0;
    }
    let shift = d.bits() as i64 - n.bits() as i64 + 64;
    let q: BigInt = if shift >= 0 {
        (n << (shift as usize)) / d
    } else {
        (n >> ((-shift) as usize)) / d
    };
    DyadicRational::new(q, -shift).to_f64()
}

/// Exact conversion of a finite double.
pub fn rational_from_f64(v: f64) -> Option<BigRational> {
    DyadicRational::from_f64(v).map(|d| dyadic_to_rational(&d))
}

pub fn dyadic_to_rational(v: &DyadicRational) -> BigRational {
    let e = v.exponent();
    if e >= 0 {
        BigRational::from_integer(v.mantissa() << (e as usize))
    } else {
        BigRational::new(v.mantissa().clone(), BigInt::one() << ((-e) as usize))
    }
}

/// `Some` iff the reduced denominator is a power of two.
pub fn rational_to_dyadic(r: &BigRational) -> Option<DyadicRational> {
    let d = r.denom();
    let tz = d.trailing_zeros().unwrap_or(0);
    if (d >> tz as usize).is_one() {
        Some(DyadicRational::new(r.numer().clone(), -(tz as i64)))
    } else {
        None
    }
}

/// Decimal expansion truncated to `max_frac_digits`; a trailing `...` marks
/// truncation.
pub fn rational_to_decimal(r: &BigRational, max_frac_digits: usize) -> String {
    let neg = r.is_negative();
    let n = r.numer().abs();
    let d = r.denom();
    let int = &n / d;
    let mut rem = &n % d;
    let mut digits = String::new();
    let mut truncated = false;
    while !rem.is_zero() {
        if digits.len() == max_frac_digits {
            truncated = true;
            break;
        }
        rem *= 10u32;
        let q = &rem / d;
        rem %= d;
        digits.push(char::from(b'0' + q.to_u8().unwrap_or(0)));
    }
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&int.to_string());
    if !digits.is_empty() {
        out.push('.');
        out.push_str(&digits);
    }
    if truncated {
        out.push_str("...");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/10").unwrap(), q(3, 10));
        assert_eq!(parse_rational("0.3").unwrap(), q(3, 10));
        assert_eq!(parse_rational("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_rational("6/4").unwrap(), q(3, 2));
        assert_eq!(format_rational(&q(6, 4)), "3/2");
        assert_eq!(format_rational(&q(2, 1)), "2/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational(".").is_err());
        assert!(parse_rational("0.3.1").is_err());
    }

    #[test]
    fn float_conversion() {
        assert_eq!(rational_to_f64(&q(3, 10)), 0.3);
        assert_eq!(rational_to_f64(&q(-1, 3)), -1.0 / 3.0);
        assert_eq!(rational_from_f64(0.5).unwrap(), q(1, 2));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rational_to_decimal(&q(1, 3), 4), "0.3333...");
        assert_eq!(rational_to_decimal(&q(-7, 4), 4), "-1.75");
    }

    #[test]
    fn dyadic_bridge() {
        assert_eq!(rational_to_dyadic(&q(9, 4)).unwrap().to_string(), "9*2^-2");
        assert!(rational_to_dyadic(&q(1, 3)).is_none());
        let d: DyadicRational = "5*2^-2".parse().unwrap();
        assert_eq!(dyadic_to_rational(&d), q(5, 4));
    }
}
