//! Local exponent of `1 - f(x, p)` as `x` decreases to 2.

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::exactnum::DyadicRational;
use crate::ruinrec::{cumulative, gap_sequence, tail_ratio};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub p: f64,
    pub n: u32,
    pub ks: Vec<u32>,
    /// `1 - f_n(2 + 2^-k)` for each `k` in `ks`.
    pub one_minus_f: Vec<f64>,
    /// `log(1 - f_n(2 + 2^-k)) / (-k log 2)`.
    pub slopes: Vec<f64>,
    /// `(log(1 - f_n(2 + 2^-k)) - log(1 - f_n(2 + 2^-(k-1)))) / (-log 2)`.
    pub local_slopes: Vec<f64>,
    /// `f_n(3)`, which enters the lower sandwich bound.
    pub f3: f64,
    /// Additive slack on `1 - f`: the largest estimated tail `f - f_n` over
    /// the points, extrapolating the last increment geometrically.
    pub slack: f64,
    /// Range of `slopes[i]` allowed by the sandwich bounds widened by `slack`.
    pub band: Vec<[f64; 2]>,
    pub in_band: Vec<bool>,
    /// Local slope at the largest `k`.
    pub fitted: f64,
    /// `log_{1/2}(1 - p)`.
    pub target: f64,
}

impl ExponentFit {
    pub fn error(&self) -> f64 {
        (self.fitted - self.target).abs()
    }

    pub fn slope_at(&self, k: u32) -> Option<(f64, f64)> {
        let i = self.ks.iter().position(|&kk| kk == k)?;
        Some((self.slopes[i], self.local_slopes[i]))
    }
}

pub fn holder_target(p: f64) -> f64 {
    (1.0 - p).ln() / 0.5f64.ln()
}

/// `g r / (1 - r)` for the last increment `g` and the decay ratio `r` fitted
/// over the second half; the whole second half if no ratio below 1 fits.
fn tail_estimate(gaps: &[f64]) -> f64 {
    let n = gaps.len();
    let last = gaps[n - 1];
    match tail_ratio(gaps, n / 2, n - 1) {
        Some(r) if r < 1.0 => last * r / (1.0 - r),
        _ => gaps[n / 2..].iter().sum(),
    }
}

/// Slopes over `k = k_lo ..= k_hi` from the exact engine at depth `n` in
/// double precision. The point `k = 0` is `x = 3`.
pub fn holder_exponent(p: f64, k_lo: u32, k_hi: u32, n: u32) -> Result<ExponentFit, AnalysisError> {
    if !(p > 0.0 && p < 0.5) {
        return Err(AnalysisError::InvalidArgument(format!("p must lie in (0, 1/2), got {p}")));
    }
    if k_lo == 0 || k_hi < k_lo || k_hi > 60 {
        return Err(AnalysisError::InvalidArgument(format!(
            "need 1 <= k_lo <= k_hi <= 60, got {k_lo}..{k_hi}"
        )));
    }
    if n < 2 {
        return Err(AnalysisError::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    let two = DyadicRational::from_int(2);
    let mut one_minus = Vec::new();
    let mut slack: f64 = 0.0;
    for k in (k_lo - 1)..=k_hi {
        let x = &two + &DyadicRational::pow2(-(k as i64));
        let gaps = gap_sequence(&x, &p, n)?;
        let f = cumulative(&gaps)[n as usize];
        slack = slack.max(tail_estimate(&gaps));
        let om = 1.0 - f;
        if om.is_nan() || om <= 0.0 {
            return Err(AnalysisError::Degenerate(format!(
                "1 - f_{n}(2 + 2^-{k}) = {om} at p = {p}"
            )));
        }
        one_minus.push(om);
    }
    let q = 1.0 - p;
    let ln2 = 2f64.ln();
    let f3 = 1.0 - one_minus[0];
    let ks: Vec<u32> = (k_lo..=k_hi).collect();
    let mut slopes = Vec::new();
    let mut local = Vec::new();
    let mut band = Vec::new();
    let mut in_band = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        let kf = k as f64;
        let s = one_minus[i + 1].ln() / (-kf * ln2);
        slopes.push(s);
        local.push((one_minus[i + 1].ln() - one_minus[i].ln()) / -ln2);
        let lo_val = ((1.0 - f3) * q.powi(k as i32) - slack).max(f64::MIN_POSITIVE);
        let hi_val = (q.powi(k as i32 - 1) + slack).min(1.0);
        let b = [hi_val.ln() / (-kf * ln2), lo_val.ln() / (-kf * ln2)];
        in_band.push(b[0] <= s && s <= b[1]);
        band.push(b);
    }
    let one_minus_f = one_minus[1..].to_vec();
    Ok(ExponentFit {
        p,
        n,
        fitted: *local.last().unwrap(),
        target: holder_target(p),
        ks,
        one_minus_f,
        slopes,
        local_slopes: local,
        f3,
        slack,
        band,
        in_band,
    })
}
