//! Two-sided bounds on `1 - f(2 + 2^-k, p)`:
//! `(1 - f(3,p)) (1-p)^k <= 1 - f(2 + 2^-k, p) <= (1-p)^(k-1)`.

use serde::{Deserialize, Serialize};

use super::plateau::{plateau_estimates, PlateauSettings};
use super::AnalysisError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichCheck {
    pub p: f64,
    pub k: u32,
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    pub slack: f64,
    /// `middle - lower + slack`; negative on failure.
    pub lower_margin: f64,
    /// `upper - middle + slack`; negative on failure.
    pub upper_margin: f64,
    pub pass: bool,
}

pub fn sandwich_check(p: f64, k: u32, f_hat_at_3: f64, f_hat_near_2: f64, slack: f64) -> SandwichCheck {
    let q = 1.0 - p;
    let lower = (1.0 - f_hat_at_3) * q.powi(k as i32);
    let middle = 1.0 - f_hat_near_2;
    let upper = q.powi(k as i32 - 1);
    let lower_margin = middle - lower + slack;
    let upper_margin = upper - middle + slack;
    SandwichCheck {
        p,
        k,
        lower,
        middle,
        upper,
        slack,
        lower_margin,
        upper_margin,
        pass: lower_margin >= 0.0 && upper_margin >= 0.0,
    }
}

/// Checks `k = 1 ..= k_max` at each `p`, with plateau estimates at
/// `tolerance` and slack `3 * tolerance`.
pub fn sandwich_sweep(
    ps: &[f64],
    k_max: u32,
    tolerance: f64,
    settings: &PlateauSettings,
) -> Result<Vec<SandwichCheck>, AnalysisError> {
    if k_max == 0 || k_max > 60 {
        return Err(AnalysisError::InvalidArgument(format!("k_max must lie in 1..=60, got {k_max}")));
    }
    let mut xs = vec![3.0];
    xs.extend((1..=k_max).map(|k| 2.0 + 2f64.powi(-(k as i32))));
    let mut out = Vec::new();
    for &p in ps {
        if !(p > 0.0 && p < 0.5) {
            return Err(AnalysisError::InvalidArgument(format!("p must lie in (0, 1/2), got {p}")));
        }
        let est = plateau_estimates(&xs, p, tolerance, settings)?;
        for k in 1..=k_max {
            out.push(sandwich_check(p, k, est[0].value, est[k as usize].value, 3.0 * tolerance));
        }
    }
    Ok(out)
}
