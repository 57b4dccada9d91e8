//! Distribution of the first `k` binary digits of `S`.

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::exactnum::DyadicRational;
use crate::gambler::{window_sample, DigitSettings, GamblerError, McEstimate, StreamRng};
use crate::ruinrec::{cumulative, gap_sequence};

/// Depth of the exact `f_n(3)` used in the zero-window bound.
const F3_DEPTH: u32 = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DigitConfig {
    pub p: f64,
    pub k: u32,
    /// Number of resolved samples to collect.
    pub samples: u64,
    pub guard_bits: u32,
    pub max_extensions: u32,
    pub seed: u64,
}

impl DigitConfig {
    pub fn new(p: f64, k: u32, samples: u64, guard_bits: u32, seed: u64) -> Self {
        DigitConfig {
            p,
            k,
            samples,
            guard_bits,
            max_extensions: DigitSettings::default().max_extensions,
            seed,
        }
    }
}

/// `P(S < 2^-k) >= (1 - f(3,p)) (1-p)^k`, checked against the empirical
/// frequency of `floor(2^k S) = 0`. The bound uses the exact `f_n(3) <= f(3)`,
/// which can only raise it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroWindowCheck {
    pub f3_lower: f64,
    pub f3_depth: u32,
    pub bound: f64,
    pub empirical: McEstimate,
    /// `empirical + 4 stderr >= bound`.
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DigitHistogram {
    pub config: DigitConfig,
    /// Counts of `floor(2^k S) mod 2^k` for digits `0 .. 2^k`.
    pub counts: Vec<u64>,
    pub resolved: u64,
    pub discarded: u64,
    pub discard_rate: f64,
    pub tv: f64,
    pub chi_square: f64,
    pub zero_window: ZeroWindowCheck,
}

pub fn tv_from_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let u = 1.0 / counts.len() as f64;
    0.5 * counts.iter().map(|&c| (c as f64 / total as f64 - u).abs()).sum::<f64>()
}

pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let e = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
}

/// Histogram of `D_{0,k}(S)` over the first `samples` resolved streams, in
/// stream order. Ambiguous streams are counted as discarded.
pub fn digit_report(cfg: &DigitConfig) -> Result<DigitHistogram, AnalysisError> {
    if !(cfg.p > 0.0 && cfg.p < 0.5) {
        return Err(AnalysisError::InvalidArgument(format!("p must lie in (0, 1/2), got {}", cfg.p)));
    }
    if cfg.k == 0 || cfg.k > 20 {
        return Err(AnalysisError::InvalidArgument(format!("k must lie in 1..=20, got {}", cfg.k)));
    }
    if cfg.samples == 0 {
        return Err(AnalysisError::InvalidArgument("samples must be positive".into()));
    }
    let settings = DigitSettings {
        guard_bits: cfg.guard_bits,
        max_extensions: cfg.max_extensions,
        ..DigitSettings::default()
    };
    let mask = (1u64 << cfg.k) - 1;
    let mut counts = vec![0u64; 1 << cfg.k];
    let (mut resolved, mut discarded, mut zero) = (0u64, 0u64, 0u64);
    let mut start = 0u64;
    while resolved < cfg.samples {
        let batch = (cfg.samples - resolved).max(1024);
        let results: Vec<Option<BigUint>> = (start..start + batch)
            .into_par_iter()
            .map(|i| -> Result<_, GamblerError> {
                let mut rng = StreamRng::new(cfg.seed, i);
                window_sample(cfg.p, cfg.k, &settings, &mut rng)
            })
            .collect::<Result<_, _>>()?;
        start += batch;
        for r in results {
            if resolved == cfg.samples {
                break;
            }
            match r {
                Some(z) => {
                    resolved += 1;
                    if z.is_zero() {
                        zero += 1;
                    }
                    let low = z.iter_u64_digits().next().unwrap_or(0);
                    counts[(low & mask) as usize] += 1;
                }
                None => discarded += 1,
            }
        }
    }
    let fs = cumulative(&gap_sequence(&DyadicRational::from_int(3), &cfg.p, F3_DEPTH)?);
    let f3 = fs[F3_DEPTH as usize];
    let bound = (1.0 - f3) * (1.0 - cfg.p).powi(cfg.k as i32);
    let empirical = McEstimate::from_counts(zero, resolved);
    let zero_window = ZeroWindowCheck {
        f3_lower: f3,
        f3_depth: F3_DEPTH,
        bound,
        pass: empirical.estimate + 4.0 * empirical.stderr >= bound,
        empirical,
    };
    Ok(DigitHistogram {
        config: cfg.clone(),
        tv: tv_from_uniform(&counts),
        chi_square: chi_square_uniform(&counts),
        counts,
        resolved,
        discarded,
        discard_rate: discarded as f64 / (resolved + discarded) as f64,
        zero_window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistics_of_known_counts() {
        assert_eq!(tv_from_uniform(&[5, 5, 5, 5]), 0.0);
        assert_eq!(chi_square_uniform(&[5, 5, 5, 5]), 0.0);
        assert!((tv_from_uniform(&[8, 0, 0, 0]) - 0.75).abs() < 1e-15);
        assert!((chi_square_uniform(&[8, 0, 0, 0]) - 24.0).abs() < 1e-12);
    }

    #[test]
    fn counts_sum_to_resolved() {
        let h = digit_report(&DigitConfig::new(0.3, 3, 2000, 32, 5)).unwrap();
        assert_eq!(h.counts.iter().sum::<u64>(), h.resolved);
        assert_eq!(h.resolved, 2000);
        assert!((0.0..=1.0).contains(&h.tv));
        assert!(h.zero_window.pass);
    }

    #[test]
    fn small_p_concentrates_on_zero() {
        let h = digit_report(&DigitConfig::new(0.01, 3, 2000, 32, 1)).unwrap();
        assert!(h.counts[0] as f64 > 0.9 * h.resolved as f64);
        assert!(h.tv > 0.75);
    }

    #[test]
    fn deterministic_in_seed() {
        let a = digit_report(&DigitConfig::new(0.3, 2, 500, 32, 9)).unwrap();
        let b = digit_report(&DigitConfig::new(0.3, 2, 500, 32, 9)).unwrap();
        assert_eq!(a, b);
    }
}
