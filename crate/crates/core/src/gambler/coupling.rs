use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GamblerError, StreamRng};
use crate::exactnum::DyadicRational;

/// Couples a `p1` round with a `p2` round so that `xi1 <= xi2`:
/// `xi1 = +1` iff `u1 < p1`; `xi2 = +1` iff `u1 < p1` or
/// `u2 < (p2 - p1) / (1 - p1)`.
pub fn coupled_pair(p1: f64, p2: f64, u1: f64, u2: f64) -> (i8, i8) {
    let first = u1 < p1;
    let second = first || (p1 < 1.0 && u2 < (p2 - p1) / (1.0 - p1));
    (if first { 1 } else { -1 }, if second { 1 } else { -1 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSummary {
    pub samples: u64,
    /// Paths on which the `p1` partial sum ever exceeded the `p2` one.
    pub domination_violations: u64,
    pub doomed_p1: u64,
    pub doomed_p2: u64,
    pub doomed_p2_only: u64,
    /// Fraction doomed under `p2` but not under `p1`.
    pub f_diff_estimate: f64,
}

struct Walk {
    level: i64,
    partial: DyadicRational,
    doomed: bool,
}

impl Walk {
    fn new(margin: &DyadicRational) -> Self {
        Walk {
            level: 0,
            partial: DyadicRational::zero(),
            doomed: DyadicRational::zero() >= *margin,
        }
    }

    fn step(&mut self, xi: i8, margin: &DyadicRational) {
        if xi > 0 {
            self.partial = &self.partial + &DyadicRational::pow2(self.level);
        }
        self.level += xi as i64;
        if !self.doomed && self.partial >= *margin {
            self.doomed = true;
        }
    }
}

/// Runs coupled paths under `p1 <= p2` and counts domination violations
/// and doom events up to `horizon`.
pub fn coupled_run(
    x: &DyadicRational,
    p1: f64,
    p2: f64,
    horizon: u64,
    samples: u64,
    seed: u64,
) -> Result<CouplingSummary, GamblerError> {
    if !(0.0 <= p1 && p1 <= p2 && p2 <= 1.0 && p1 < 1.0) {
        return Err(GamblerError::InvalidArgument(format!(
            "coupling needs 0 <= p1 <= p2 <= 1 and p1 < 1, got p1={p1}, p2={p2}"
        )));
    }
    if samples == 0 {
        return Err(GamblerError::InvalidArgument("samples must be at least 1".into()));
    }
    let margin = x - &DyadicRational::from_int(2);
    let zero = [0u64; 4];
    let counts = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = StreamRng::new(seed, i);
            let mut a = Walk::new(&margin);
            let mut b = Walk::new(&margin);
            let mut violated = false;
            for _ in 0..horizon {
                if a.doomed && b.doomed {
                    break;
                }
                let (u1, u2) = (rng.uniform(), rng.uniform());
                let (xi1, xi2) = coupled_pair(p1, p2, u1, u2);
                a.step(xi1, &margin);
                b.step(xi2, &margin);
                if a.partial > b.partial {
                    violated = true;
                }
            }
            [
                u64::from(violated),
                u64::from(a.doomed),
                u64::from(b.doomed),
                u64::from(b.doomed && !a.doomed),
            ]
        })
        .reduce(|| zero, |l, r| [l[0] + r[0], l[1] + r[1], l[2] + r[2], l[3] + r[3]]);
    Ok(CouplingSummary {
        samples,
        domination_violations: counts[0],
        doomed_p1: counts[1],
        doomed_p2: counts[2],
        doomed_p2_only: counts[3],
        f_diff_estimate: counts[3] as f64 / samples as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_cases() {
        assert_eq!(coupled_pair(0.2, 0.4, 0.1, 0.9), (1, 1));
        assert_eq!(coupled_pair(0.2, 0.4, 0.3, 0.1), (-1, 1));
        assert_eq!(coupled_pair(0.2, 0.4, 0.3, 0.5), (-1, -1));
    }

    #[test]
    fn equal_probabilities_coincide() {
        let mut rng = StreamRng::new(1, 0);
        for _ in 0..1000 {
            let (a, b) = coupled_pair(0.3, 0.3, rng.uniform(), rng.uniform());
            assert_eq!(a, b);
        }
    }

    #[test]
    fn marginal_of_second_coordinate() {
        let mut rng = StreamRng::new(2, 0);
        let n = 200_000;
        let wins = (0..n)
            .filter(|_| coupled_pair(0.2, 0.4, rng.uniform(), rng.uniform()).1 == 1)
            .count();
        let freq = wins as f64 / n as f64;
        assert!((freq - 0.4).abs() < 4.0 * (0.24f64 / n as f64).sqrt());
    }

    #[test]
    fn run_dominates() {
        let s = coupled_run(&DyadicRational::from_int(3), 0.2, 0.4, 100, 3000, 5).unwrap();
        assert_eq!(s.domination_violations, 0);
        assert!(s.f_diff_estimate > 0.0);
        assert!(s.doomed_p1 <= s.doomed_p2);
        let s = coupled_run(&DyadicRational::from_int(3), 0.3, 0.3, 100, 500, 5).unwrap();
        assert_eq!(s.doomed_p2_only, 0);
        assert_eq!(s.doomed_p1, s.doomed_p2);
    }

    #[test]
    fn bad_order_rejected() {
        assert!(coupled_run(&DyadicRational::from_int(3), 0.4, 0.2, 10, 10, 1).is_err());
    }
}
