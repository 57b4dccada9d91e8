use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_probability, GamblerError, StreamRng};

/// Bet multiplied by `rho` after a win and divided by it after a loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub rho: f64,
    pub p: f64,
    pub x: f64,
    /// `rho / (rho - 1)`.
    pub doom_threshold: f64,
}

impl GenConfig {
    pub fn new(rho: f64, p: f64, x: f64) -> Result<Self, GamblerError> {
        if !(rho > 1.0 && rho.is_finite()) {
            return Err(GamblerError::InvalidArgument(format!("rho must exceed 1, got {rho}")));
        }
        check_probability("p", p)?;
        if !x.is_finite() {
            return Err(GamblerError::InvalidArgument(format!("x must be finite, got {x}")));
        }
        Ok(GenConfig {
            rho,
            p,
            x,
            doom_threshold: rho / (rho - 1.0),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenOutcome {
    pub doomed_at: Option<u64>,
    pub steps: u64,
    pub final_y: f64,
}

/// Runs `Y -> (Y + 1) / rho` on a win and `Y -> rho (Y - 1)` on a loss from
/// `Y_0 = x` until `Y <= rho / (rho - 1)` or the horizon. One uniform is
/// drawn per round, as in the standard simulator.
pub fn generalized_run(cfg: &GenConfig, horizon: u64, rng: &mut StreamRng) -> GenOutcome {
    let mut y = cfg.x;
    let mut n = 0;
    if y <= cfg.doom_threshold {
        return GenOutcome {
            doomed_at: Some(0),
            steps: 0,
            final_y: y,
        };
    }
    while n < horizon {
        y = if rng.uniform() < cfg.p { (y + 1.0) / cfg.rho } else { cfg.rho * (y - 1.0) };
        n += 1;
        if y <= cfg.doom_threshold {
            return GenOutcome {
                doomed_at: Some(n),
                steps: n,
                final_y: y,
            };
        }
    }
    GenOutcome {
        doomed_at: None,
        steps: n,
        final_y: y,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub x: f64,
    pub samples: u64,
    pub doomed: u64,
    pub doomed_frac: f64,
    pub survival: f64,
}

/// Doomed fraction within `horizon` at each starting fortune; sample `i`
/// uses stream `i` at every grid point.
pub fn threshold_scan(
    rho: f64,
    p: f64,
    x_grid: &[f64],
    horizon: u64,
    samples: u64,
    seed: u64,
) -> Result<Vec<ScanRow>, GamblerError> {
    if samples == 0 {
        return Err(GamblerError::InvalidArgument("samples must be at least 1".into()));
    }
    x_grid
        .iter()
        .map(|&x| {
            let cfg = GenConfig::new(rho, p, x)?;
            let doomed: u64 = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let mut rng = StreamRng::new(seed, i);
                    u64::from(generalized_run(&cfg, horizon, &mut rng).doomed_at.is_some())
                })
                .sum();
            let frac = doomed as f64 / samples as f64;
            Ok(ScanRow {
                x,
                samples,
                doomed,
                doomed_frac: frac,
                survival: 1.0 - frac,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::DyadicRational;
    use crate::gambler::{run_path, RunOptions};

    #[test]
    fn threshold_value() {
        let c = GenConfig::new(3.0, 0.3, 1.4).unwrap();
        assert_eq!(c.doom_threshold, 1.5);
        assert!(GenConfig::new(1.0, 0.3, 2.0).is_err());
    }

    #[test]
    fn ratio_two_matches_standard_process() {
        let cfg = GenConfig::new(2.0, 0.3, 3.0).unwrap();
        let x = DyadicRational::from_int(3);
        for i in 0..300 {
            let mut a = StreamRng::new(4, i);
            let mut b = StreamRng::new(4, i);
            let g = generalized_run(&cfg, 40, &mut a);
            let s = run_path(&x, 0.3, 40, &mut b, RunOptions { stop_at_doom: true }).unwrap();
            assert_eq!(g.doomed_at, s.doomed_at, "stream {i}");
        }
    }

    #[test]
    fn below_threshold_is_doomed_at_start() {
        let cfg = GenConfig::new(3.0, 0.3, 1.5).unwrap();
        let mut rng = StreamRng::new(1, 0);
        assert_eq!(generalized_run(&cfg, 10, &mut rng).doomed_at, Some(0));
    }

    #[test]
    fn scan_rows() {
        let rows = threshold_scan(3.0, 0.3, &[1.4, 1.6], 100, 500, 2).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].doomed, 500);
        assert!(rows[1].doomed_frac < 1.0);
    }
}
