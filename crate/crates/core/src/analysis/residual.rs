//! Residual of `f(x) = p f((x+1)/2) + (1-p) f(2x-2)` under plateau estimates.

use serde::{Deserialize, Serialize};

use super::plateau::{plateau_estimates, PlateauSettings};
use super::AnalysisError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub x: f64,
    pub p: f64,
    pub f_x: f64,
    pub f_win: f64,
    pub f_lose: f64,
    pub residual: f64,
    pub bound: f64,
    pub pass: bool,
}

/// One row per `(x, p)`; each `p` takes a single plateau pass over all
/// points and their images. The bound is `2 * tolerance`.
pub fn residual_grid(
    xs: &[f64],
    ps: &[f64],
    tolerance: f64,
    settings: &PlateauSettings,
) -> Result<Vec<ResidualRow>, AnalysisError> {
    let mut rows = Vec::new();
    for &p in ps {
        let mut pts = Vec::with_capacity(3 * xs.len());
        for &x in xs {
            pts.extend([x, (x + 1.0) / 2.0, 2.0 * x - 2.0]);
        }
        let est = plateau_estimates(&pts, p, tolerance, settings)?;
        for (i, &x) in xs.iter().enumerate() {
            let (f_x, f_win, f_lose) = (est[3 * i].value, est[3 * i + 1].value, est[3 * i + 2].value);
            let residual = (f_x - p * f_win - (1.0 - p) * f_lose).abs();
            rows.push(ResidualRow {
                x,
                p,
                f_x,
                f_win,
                f_lose,
                residual,
                bound: 2.0 * tolerance,
                pass: residual <= 2.0 * tolerance,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ruinrec::GridConfig;

    #[test]
    fn residual_small_at_low_p() {
        let s = PlateauSettings {
            n_start: 8,
            n_cap: 128,
            grid: GridConfig {
                bits: 12,
                top_binade: 48,
            },
        };
        let rows = residual_grid(&[2.25, 3.0, 5.0], &[0.1, 0.2], 1e-6, &s).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.pass), "{rows:?}");
    }

    #[test]
    fn doomed_images_count_as_one() {
        let s = PlateauSettings::default();
        let rows = residual_grid(&[1.5], &[0.3], 1e-6, &s).unwrap();
        assert_eq!((rows[0].f_x, rows[0].residual), (1.0, 0.0));
    }
}
