//! How fast `f_n` settles: uniform gaps between depths, the decay of the
//! increments at a point, and the modulus of continuity in `x`.

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::exactnum::DyadicRational;
use crate::ruinrec::{gap_sequence, iterate_step_with, sup_diff_steps, tail_ratio, GridBracket, GridConfig};
use crate::ruinrec::{StepFunction, DEFAULT_BREAKPOINT_BUDGET};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: u32,
    /// `sup |f_{2n} - f_n|` over `[x_lo, x_hi]`.
    pub sup_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub p: f64,
    pub x_lo: String,
    pub x_hi: String,
    pub rows: Vec<ConvergenceRow>,
    pub nonincreasing: bool,
    pub strictly_decreasing: bool,
}

impl ConvergenceReport {
    /// Ratio of the last to the first sup gap.
    pub fn overall_ratio(&self) -> Option<f64> {
        let first = self.rows.first()?.sup_diff;
        let last = self.rows.last()?.sup_diff;
        (first > 0.0).then(|| last / first)
    }
}

/// `sup |f_{2n} - f_n|` on `[x_lo, x_hi]` for each `n` in `n_list`, from
/// one run of the step-function engine in double precision.
pub fn convergence_report(
    p: f64,
    x_lo: &DyadicRational,
    x_hi: &DyadicRational,
    n_list: &[u32],
) -> Result<ConvergenceReport, AnalysisError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(AnalysisError::InvalidArgument(format!("p must lie in [0, 1], got {p}")));
    }
    if *x_lo <= DyadicRational::from_int(2) || x_hi <= x_lo {
        return Err(AnalysisError::InvalidArgument("need 2 < x_lo < x_hi".into()));
    }
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalysisError::InvalidArgument("n list must be nonempty and increasing".into()));
    }
    let top = 2 * *n_list.last().unwrap();
    let mut kept: std::collections::BTreeMap<u32, StepFunction<f64>> = Default::default();
    iterate_step_with(top, &p, DEFAULT_BREAKPOINT_BUDGET, |level, f| {
        if n_list.iter().any(|&n| n == level || 2 * n == level) {
            kept.insert(level, f.clone());
        }
    })?;
    let rows: Vec<ConvergenceRow> = n_list
        .iter()
        .map(|&n| ConvergenceRow {
            n,
            sup_diff: sup_diff_steps(&kept[&(2 * n)], &kept[&n], x_lo, x_hi),
        })
        .collect();
    Ok(ConvergenceReport {
        p,
        x_lo: x_lo.to_string(),
        x_hi: x_hi.to_string(),
        nonincreasing: rows.windows(2).all(|w| w[1].sup_diff <= w[0].sup_diff),
        strictly_decreasing: rows.windows(2).all(|w| w[1].sup_diff < w[0].sup_diff),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapDecay {
    pub x: String,
    pub p: f64,
    pub k_lo: usize,
    pub k_hi: usize,
    /// `f_{k+1} - f_k` for `k = 0 ..= k_hi`.
    pub gaps: Vec<f64>,
    pub nonnegative: bool,
    /// Fitted geometric ratio over `k_lo ..= k_hi`.
    pub ratio: Option<f64>,
}

pub fn gap_decay(x: &DyadicRational, p: f64, k_lo: usize, k_hi: usize) -> Result<GapDecay, AnalysisError> {
    if !(0.0..=1.0).contains(&p) || k_hi <= k_lo {
        return Err(AnalysisError::InvalidArgument(format!(
            "need p in [0, 1] and k_lo < k_hi, got p = {p}, {k_lo}..{k_hi}"
        )));
    }
    let gaps = gap_sequence(x, &p, k_hi as u32 + 1)?;
    Ok(GapDecay {
        x: x.to_string(),
        p,
        k_lo,
        k_hi,
        nonnegative: gaps.iter().all(|&g| g >= 0.0),
        ratio: tail_ratio(&gaps, k_lo, k_hi),
        gaps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusRow {
    pub j: u32,
    pub h: f64,
    /// Largest `f(x) - f(x + h)` over the grid, bracket midpoints at `level`.
    pub max_drop: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusReport {
    pub p: f64,
    pub level: u32,
    pub x_lo: f64,
    pub x_hi: f64,
    pub rows: Vec<ModulusRow>,
    /// Widest bracket met, an error bar on every drop.
    pub max_width: f64,
    pub nonincreasing: bool,
}

/// `max f(x) - f(x + 2^-j)` over the grid `x_lo + i 2^-j_max` in `[x_lo, x_hi]`
/// for `j = j_lo ..= j_max`.
pub fn modulus_check(
    p: f64,
    x_lo: f64,
    x_hi: f64,
    j_lo: u32,
    j_max: u32,
    level: u32,
    cfg: GridConfig,
) -> Result<ModulusReport, AnalysisError> {
    if !(x_lo > 2.0 && x_hi > x_lo) || j_lo > j_max || j_max > 20 {
        return Err(AnalysisError::InvalidArgument(format!(
            "need 2 < x_lo < x_hi and j_lo <= j_max <= 20, got [{x_lo}, {x_hi}], {j_lo}..{j_max}"
        )));
    }
    let mut grid = GridBracket::new(p, cfg)?;
    grid.advance_to(level);
    let step = 2f64.powi(-(j_max as i32));
    let count = ((x_hi - x_lo) / step).floor() as usize;
    let mut max_width: f64 = 0.0;
    let vals: Vec<f64> = (0..=count)
        .map(|i| {
            let (lo, hi) = grid.bounds(x_lo + i as f64 * step);
            max_width = max_width.max(hi - lo);
            0.5 * (lo + hi)
        })
        .collect();
    let rows: Vec<ModulusRow> = (j_lo..=j_max)
        .map(|j| {
            let stride = 1usize << (j_max - j);
            let max_drop = (0..vals.len().saturating_sub(stride))
                .map(|i| vals[i] - vals[i + stride])
                .fold(0.0, f64::max);
            ModulusRow {
                j,
                h: 2f64.powi(-(j as i32)),
                max_drop,
            }
        })
        .collect();
    Ok(ModulusReport {
        p,
        level,
        x_lo,
        x_hi,
        nonincreasing: rows.windows(2).all(|w| w[1].max_drop <= w[0].max_drop + 2.0 * max_width),
        max_width,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse_rational;

    fn d(s: &str) -> DyadicRational {
        crate::exactnum::rational_to_dyadic(&parse_rational(s).unwrap()).unwrap()
    }

    #[test]
    fn single_row() {
        let r = convergence_report(0.3, &d("5/2"), &d("10"), &[4]).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!(r.nonincreasing && r.strictly_decreasing);
    }

    #[test]
    fn sup_gaps_decrease_faster_at_smaller_p() {
        let a = convergence_report(0.3, &d("5/2"), &d("10"), &[4, 8, 16]).unwrap();
        let b = convergence_report(0.45, &d("5/2"), &d("10"), &[4, 8, 16]).unwrap();
        assert!(a.strictly_decreasing, "{a:?}");
        assert!(b.nonincreasing, "{b:?}");
        assert!(a.overall_ratio().unwrap() < b.overall_ratio().unwrap());
    }

    #[test]
    fn gap_decay_is_geometric() {
        let g = gap_decay(&DyadicRational::from_int(3), 0.3, 10, 30).unwrap();
        assert!(g.nonnegative);
        assert_eq!(g.gaps.len(), 31);
        let r = g.ratio.unwrap();
        assert!(r > 0.8 && r < 0.9, "{r}");
    }

    #[test]
    fn modulus_shrinks_with_h() {
        let cfg = GridConfig {
            bits: 12,
            top_binade: 40,
        };
        let m = modulus_check(0.3, 2.5, 6.0, 1, 8, 64, cfg).unwrap();
        assert!(m.nonincreasing, "{m:?}");
        assert!(m.rows.last().unwrap().max_drop < m.rows[0].max_drop);
    }
}
