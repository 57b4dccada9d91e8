use num_bigint::BigUint;
use num_traits::Zero;

use super::{GamblerError, StreamRng};
use crate::exactnum::DyadicRational;

pub const DEFAULT_BLOCK_STEP_CAP: u64 = 1 << 20;

/// Walks the level process `S_n` and cuts it at the first hitting times
/// `tau_i` of `-i`, accumulating
/// `A_i = sum over tau_i < n <= tau_{i+1} of 1{win} 2^(S_{n-1} + i)`.
/// Inside block `i` the level stays `>= -i`, so every `A_i` is an integer.
#[derive(Debug, Clone, Default)]
pub struct BlockWalker {
    level: i64,
    n: u64,
    blocks: Vec<BigUint>,
    tau: Vec<u64>,
    current: BigUint,
    raw_partial: DyadicRational,
}

impl BlockWalker {
    pub fn new() -> Self {
        BlockWalker {
            tau: vec![0],
            ..Default::default()
        }
    }

    /// Feeds one round; returns `true` when it completes a block.
    pub fn push(&mut self, win: bool) -> bool {
        let i = self.blocks.len() as i64;
        if win {
            self.current += BigUint::from(1u8) << (self.level + i) as usize;
            self.raw_partial = &self.raw_partial + &DyadicRational::pow2(self.level);
            self.level += 1;
        } else {
            self.level -= 1;
        }
        self.n += 1;
        if self.level == -(i + 1) {
            self.blocks.push(std::mem::take(&mut self.current));
            self.tau.push(self.n);
            return true;
        }
        false
    }

    pub fn completed(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[BigUint] {
        &self.blocks
    }

    /// Draws rounds until `count` blocks are complete.
    pub fn extend(
        &mut self,
        rng: &mut StreamRng,
        p: f64,
        count: usize,
        step_cap: u64,
    ) -> Result<(), GamblerError> {
        while self.blocks.len() < count {
            let start = *self.tau.last().unwrap();
            if self.n - start >= step_cap {
                return Err(GamblerError::BlockCap {
                    block: self.blocks.len(),
                    cap: step_cap,
                });
            }
            self.push(rng.uniform() < p);
        }
        Ok(())
    }

    pub fn sample(&self) -> BlockSample {
        BlockSample {
            blocks: self.blocks.clone(),
            tau: self.tau.clone(),
            raw_partial: self.raw_partial.clone(),
        }
    }
}

/// Blocks `A_0 ..= A_I`, hitting times `tau_0 ..= tau_{I+1}`, and the raw
/// partial sum of `S` at `tau_{I+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSample {
    pub blocks: Vec<BigUint>,
    pub tau: Vec<u64>,
    pub raw_partial: DyadicRational,
}

impl BlockSample {
    /// `sum_i A_i 2^-i`.
    pub fn block_sum(&self) -> DyadicRational {
        weighted_sum(&self.blocks, 0)
    }

    pub fn is_consistent(&self) -> bool {
        self.block_sum() == self.raw_partial
    }
}

/// `sum_{n >= 0} A_{n + from} 2^-n` over the available blocks.
pub(crate) fn weighted_sum(blocks: &[BigUint], from: usize) -> DyadicRational {
    let mut acc = DyadicRational::zero();
    for (n, a) in blocks.iter().enumerate().skip(from) {
        if !a.is_zero() {
            let term = DyadicRational::new(num_bigint::BigInt::from(a.clone()), -((n - from) as i64));
            acc = &acc + &term;
        }
    }
    acc
}

/// Samples `block_count` blocks at `p < 1/2`.
pub fn sample_blocks(
    p: f64,
    block_count: usize,
    step_cap: u64,
    rng: &mut StreamRng,
) -> Result<BlockSample, GamblerError> {
    if !(0.0..0.5).contains(&p) {
        return Err(GamblerError::InvalidArgument(format!(
            "blocks need p in [0, 1/2) so that every level is hit, got {p}"
        )));
    }
    let mut walker = BlockWalker::new();
    walker.extend(rng, p, block_count, step_cap)?;
    Ok(walker.sample())
}

/// Blocks cut from a fixed sequence of rounds (`+1` win, `-1` loss), or
/// `None` if it completes fewer than `block_count` blocks.
pub fn blocks_from_xi(xis: &[i8], block_count: usize) -> Option<BlockSample> {
    let mut walker = BlockWalker::new();
    for &xi in xis {
        if walker.completed() >= block_count {
            break;
        }
        walker.push(xi > 0);
    }
    (walker.completed() >= block_count).then(|| walker.sample())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn immediate_loss_gives_empty_block() {
        let b = blocks_from_xi(&[-1], 1).unwrap();
        assert_eq!(b.tau, vec![0, 1]);
        assert_eq!(b.blocks, vec![BigUint::zero()]);
    }

    #[test]
    fn win_loss_loss() {
        let b = blocks_from_xi(&[1, -1, -1], 1).unwrap();
        assert_eq!(b.tau, vec![0, 3]);
        assert_eq!(b.blocks, vec![BigUint::from(1u8)]);
        assert!(b.is_consistent());
    }

    #[test]
    fn second_block_is_rescaled() {
        // level path 0 -> -1 (tau_1) -> 0 -> -1 -> -2 (tau_2)
        let b = blocks_from_xi(&[-1, 1, -1, -1], 2).unwrap();
        assert_eq!(b.tau, vec![0, 1, 4]);
        // the win at level -1 contributes 2^(-1 + 1) = 1 to A_1
        assert_eq!(b.blocks[1], BigUint::from(1u8));
        assert_eq!(b.raw_partial, "0.5".parse().unwrap());
        assert!(b.is_consistent());
    }

    #[test]
    fn incomplete_script() {
        assert!(blocks_from_xi(&[1, 1, -1], 1).is_none());
    }

    #[test]
    fn sampled_blocks_are_consistent() {
        for i in 0..200 {
            let mut rng = StreamRng::new(3, i);
            let b = sample_blocks(0.3, 12, DEFAULT_BLOCK_STEP_CAP, &mut rng).unwrap();
            assert_eq!(b.blocks.len(), 12);
            assert!(b.tau.windows(2).all(|w| w[0] < w[1]));
            assert!(b.is_consistent());
        }
    }

    #[test]
    fn cap_and_precondition() {
        let mut rng = StreamRng::new(3, 0);
        assert!(sample_blocks(0.5, 2, 10, &mut rng).is_err());
        let mut rng = StreamRng::new(3, 0);
        let err = sample_blocks(0.49, 50, 1, &mut rng);
        assert!(matches!(err, Err(GamblerError::BlockCap { .. })));
    }
}
