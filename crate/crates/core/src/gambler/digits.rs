use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::blocks::weighted_sum;
use super::{BlockWalker, GamblerError, StreamRng, DEFAULT_BLOCK_STEP_CAP};
use crate::exactnum::DyadicRational;

/// `floor(2^(j+k) x) mod 2^k` for `x >= 0` and `k <= 63`.
pub fn digit_of(x: &DyadicRational, j: u32, k: u32) -> u64 {
    let scaled = x.floor_mul_pow2((j + k) as i64);
    let modulus = BigInt::one() << k;
    let r = ((scaled % &modulus) + &modulus) % &modulus;
    r.to_u64().unwrap_or(0)
}

/// Resolution rule for digits of `S` computed from finitely many blocks.
///
/// With blocks `A_0 ..= A_I` the remaining tail is `2^-I` times a copy of
/// `S / 2`. It is taken to lie in `[0, 2^-(I + 1 - guard/2))`, and a digit
/// counts as resolved only if it is the same for every tail in that range.
/// Unresolved samples draw `guard_bits` more blocks, at most
/// `max_extensions` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitSettings {
    pub guard_bits: u32,
    pub max_extensions: u32,
    pub step_cap: u64,
}

impl Default for DigitSettings {
    fn default() -> Self {
        DigitSettings {
            guard_bits: 32,
            max_extensions: 4,
            step_cap: DEFAULT_BLOCK_STEP_CAP,
        }
    }
}

impl DigitSettings {
    pub fn with_guard(guard_bits: u32) -> Self {
        DigitSettings {
            guard_bits,
            ..Default::default()
        }
    }

    /// Exponent `r` such that the tail after `blocks` blocks is taken below `2^-r`.
    fn resolved_bits(&self, blocks: usize) -> i64 {
        blocks as i64 - (self.guard_bits / 2) as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DigitOutcome {
    Digit(u64),
    Ambiguous,
}

/// `floor(2^k v)` when it is the same for all of `[v, v + 2^-r)`.
fn stable_floor(v: &DyadicRational, k: u32, r: i64) -> Option<BigInt> {
    let lo = v.floor_mul_pow2(k as i64);
    let next = DyadicRational::from_bigint(&lo + BigInt::one()).mul_pow2(-(k as i64));
    let reach = v + &DyadicRational::pow2(-r);
    (reach <= next).then_some(lo)
}

/// `floor(2^k S)` for one sampled `S`, or `None` if it cannot be resolved.
pub fn window_sample(
    p: f64,
    k: u32,
    settings: &DigitSettings,
    rng: &mut StreamRng,
) -> Result<Option<BigUint>, GamblerError> {
    check_digit_args(p, k)?;
    let mut walker = BlockWalker::new();
    let mut count = (k + settings.guard_bits) as usize + 1;
    for _ in 0..=settings.max_extensions {
        walker.extend(rng, p, count, settings.step_cap)?;
        let s = weighted_sum(walker.blocks(), 0);
        if let Some(z) = stable_floor(&s, k, settings.resolved_bits(count)) {
            return Ok(z.to_biguint());
        }
        count += settings.guard_bits.max(1) as usize;
    }
    Ok(None)
}

/// The window `D_{0,k}(S)`, or `Ambiguous` if it cannot be resolved.
pub fn digit_sample(
    p: f64,
    k: u32,
    settings: &DigitSettings,
    rng: &mut StreamRng,
) -> Result<DigitOutcome, GamblerError> {
    Ok(match window_sample(p, k, settings, rng)? {
        Some(z) => {
            let low = z.iter_u64_digits().next().unwrap_or(0);
            DigitOutcome::Digit(low & ((1u64 << k) - 1))
        }
        None => DigitOutcome::Ambiguous,
    })
}

fn check_digit_args(p: f64, k: u32) -> Result<(), GamblerError> {
    if !(0.0..0.5).contains(&p) {
        return Err(GamblerError::InvalidArgument(format!("digits need p in [0, 1/2), got {p}")));
    }
    if !(1..=63).contains(&k) {
        return Err(GamblerError::InvalidArgument(format!("k must lie in 1..=63, got {k}")));
    }
    Ok(())
}

/// `Z_j = floor(2^k sum_{n>=0} A_{n+j} 2^-n)` for `j = 0 ..= j_max`, with
/// `None` at sites that could not be resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZChain {
    pub k: u32,
    pub blocks: Vec<BigUint>,
    pub z: Vec<Option<BigUint>>,
}

impl ZChain {
    /// `(checked, holding)`: sites `j` with `Z_j` and `Z_{j+1}` resolved, and
    /// how many of them satisfy `Z_j = 2^k A_j + floor(Z_{j+1} / 2)`.
    pub fn recursion_check(&self) -> (usize, usize) {
        let mut checked = 0;
        let mut holds = 0;
        for j in 0..self.z.len().saturating_sub(1) {
            if let (Some(zj), Some(zn)) = (&self.z[j], &self.z[j + 1]) {
                checked += 1;
                let rhs = (&self.blocks[j] << self.k as usize) + (zn >> 1usize);
                if *zj == rhs {
                    holds += 1;
                }
            }
        }
        (checked, holds)
    }

    pub fn resolved(&self) -> usize {
        self.z.iter().filter(|z| z.is_some()).count()
    }
}

fn chain(blocks: Vec<BigUint>, k: u32, j_max: usize, tail_bits: Option<i64>) -> ZChain {
    let z = (0..=j_max)
        .map(|j| {
            let t = weighted_sum(&blocks, j);
            let floor = match tail_bits {
                None => Some(t.floor_mul_pow2(k as i64)),
                // the tail of T_j is 2^j times the tail of S
                Some(r) => stable_floor(&t, k, r - j as i64),
            };
            floor.and_then(|f| f.to_biguint())
        })
        .collect();
    ZChain { k, blocks, z }
}

/// Samples blocks and builds the chain `Z_0 ..= Z_{j_max}`.
pub fn z_chain(
    p: f64,
    k: u32,
    j_max: usize,
    settings: &DigitSettings,
    rng: &mut StreamRng,
) -> Result<ZChain, GamblerError> {
    check_digit_args(p, k)?;
    let count = j_max + (k + settings.guard_bits) as usize + 1;
    let mut walker = BlockWalker::new();
    walker.extend(rng, p, count, settings.step_cap)?;
    let r = settings.resolved_bits(count);
    Ok(chain(walker.blocks().to_vec(), k, j_max, Some(r)))
}

/// The chain of an explicit block sequence followed by an all-zero tail.
pub fn z_chain_from_blocks(blocks: &[BigUint], k: u32, j_max: usize) -> ZChain {
    chain(blocks.to_vec(), k, j_max, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_windows() {
        let v: DyadicRational = "1.75".parse().unwrap();
        assert_eq!(digit_of(&v, 0, 2), 3);
        assert_eq!(digit_of(&v, 0, 1), 1);
        let v: DyadicRational = "5.625".parse().unwrap(); // 101.101
        assert_eq!(digit_of(&v, 0, 3), 5);
        assert_eq!(digit_of(&v, 1, 2), 1);
        assert_eq!(digit_of(&v, 3, 4), 0);
    }

    #[test]
    fn stability_window() {
        let v: DyadicRational = "0.25".parse().unwrap();
        assert_eq!(stable_floor(&v, 1, 2), Some(BigInt::from(0)));
        assert_eq!(stable_floor(&v, 1, 1), None);
    }

    #[test]
    fn explicit_chain() {
        let blocks = vec![BigUint::from(1u8), BigUint::from(0u8), BigUint::from(0u8)];
        let c = z_chain_from_blocks(&blocks, 2, 2);
        assert_eq!(c.z[0], Some(BigUint::from(4u8)));
        assert_eq!(c.z[1], Some(BigUint::from(0u8)));
        assert_eq!(c.recursion_check(), (2, 2));
    }

    #[test]
    fn zero_tail_chain() {
        let blocks = vec![BigUint::from(0u8); 5];
        let c = z_chain_from_blocks(&blocks, 3, 4);
        assert!(c.z.iter().all(|z| z.as_ref().is_some_and(|v| *v == BigUint::from(0u8))));
        assert_eq!(c.recursion_check(), (4, 4));
    }

    #[test]
    fn sampled_chain_satisfies_recursion() {
        let settings = DigitSettings::default();
        for i in 0..100 {
            let mut rng = StreamRng::new(8, i);
            let c = z_chain(0.3, 2, 20, &settings, &mut rng).unwrap();
            let (checked, holds) = c.recursion_check();
            assert_eq!(checked, holds);
            assert!(c.resolved() >= 20);
        }
    }

    #[test]
    fn sampled_digits_mostly_resolve() {
        let settings = DigitSettings::default();
        let mut ambiguous = 0;
        for i in 0..500 {
            let mut rng = StreamRng::new(9, i);
            match digit_sample(0.3, 3, &settings, &mut rng).unwrap() {
                DigitOutcome::Digit(d) => assert!(d < 8),
                DigitOutcome::Ambiguous => ambiguous += 1,
            }
        }
        assert!(ambiguous <= 5);
    }

    #[test]
    fn tiny_p_concentrates_on_zero() {
        let settings = DigitSettings::default();
        let mut zeros = 0;
        for i in 0..200 {
            let mut rng = StreamRng::new(10, i);
            if digit_sample(0.001, 3, &settings, &mut rng).unwrap() == DigitOutcome::Digit(0) {
                zeros += 1;
            }
        }
        assert!(zeros >= 190);
    }
}
