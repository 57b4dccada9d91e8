//! Two-sided bounds on `f_k(x, p)` for horizons far beyond the reach of the
//! exact engines, for all `x` at once.
//!
//! Values are tracked on the grid of `X = x - 2` with `bits` significant
//! bits, binades `-bits ..= top_binade`. Below `2^bits` the grid is closed
//! under `X -> (X - 1) / 2` and `X -> 2X`, so the recursion is exact there.
//! Above it a win is rounded down for the upper bound and up for the lower
//! bound; this is valid because `f_k` is decreasing in `x`. Past the top
//! binade the lower bound uses 0 and the upper bound uses the moment estimate
//! `P(S >= X) <= E[S^t] X^-t`, `E[S^t] <= p / (1 - p 2^t - q 2^-t)`.

use serde::{Deserialize, Serialize};

use super::RecError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Significant bits of the grid, between 2 and 24.
    pub bits: u32,
    /// Highest binade kept on the grid.
    pub top_binade: i32,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            bits: 16,
            top_binade: 64,
        }
    }
}

/// Bounds on `f_0 ..= f_n` at one starting point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketProfile {
    pub x: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BracketProfile {
    pub fn width(&self, k: usize) -> f64 {
        self.upper[k] - self.lower[k]
    }
}

/// `X -> min(1, bound on P(doom from X))`, valid at every horizon.
fn tail_bound(p: f64, x: f64) -> f64 {
    let q = 1.0 - p;
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 0.5 {
        return 1.0;
    }
    let alpha = (q / p).log2();
    let mut best: f64 = 1.0;
    for j in 1..16 {
        let t = (alpha * j as f64 / 16.0).min(1.0);
        let m = p * 2f64.powf(t) + q * 2f64.powf(-t);
        if m < 1.0 {
            best = best.min(p / (1.0 - m) * x.powf(-t));
        }
    }
    best
}

/// Upper and lower approximants on the grid, advanced one level at a time.
#[derive(Debug, Clone)]
pub struct GridBracket {
    p: f64,
    cfg: GridConfig,
    level: u32,
    half: usize,
    lo_binade: i32,
    loss: Vec<u32>,
    win_upper: Vec<u32>,
    win_lower: Vec<u32>,
    upper: Vec<f64>,
    lower: Vec<f64>,
    spare_upper: Vec<f64>,
    spare_lower: Vec<f64>,
    top_bound: f64,
}

impl GridBracket {
    pub fn new(p: f64, cfg: GridConfig) -> Result<Self, RecError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(RecError::InvalidArgument(format!("p must lie in [0,1], got {p}")));
        }
        if !(2..=24).contains(&cfg.bits) || cfg.top_binade < cfg.bits as i32 || cfg.top_binade > 900 {
            return Err(RecError::InvalidArgument(format!(
                "grid needs 2 <= bits <= 24 and bits <= top_binade <= 900, got {cfg:?}"
            )));
        }
        let b = cfg.bits as i32;
        let half = 1usize << (b - 1);
        let lo_binade = -b;
        let binades = (cfg.top_binade - lo_binade + 1) as usize;
        let n = binades * half;
        let doom = n as u32;
        let top = n as u32 + 1;
        let idx = |e: i32, j: usize| ((e - lo_binade) as usize * half + j) as u32;

        let mut loss = Vec::with_capacity(n);
        let mut win_upper = Vec::with_capacity(n);
        let mut win_lower = Vec::with_capacity(n);
        for e in lo_binade..=cfg.top_binade {
            let s = e - b + 1;
            for j in 0..half {
                let m = (half + j) as u64;
                loss.push(if e < cfg.top_binade { idx(e + 1, j) } else { top });
                if s <= 0 {
                    let one = 1u64 << (-s);
                    if m <= one {
                        win_upper.push(doom);
                        win_lower.push(doom);
                        continue;
                    }
                    let mut mm = m - one;
                    let mut ss = s - 1;
                    while mm < half as u64 {
                        mm <<= 1;
                        ss -= 1;
                    }
                    let target = idx(ss + b - 1, mm as usize - half);
                    win_upper.push(target);
                    win_lower.push(target);
                } else {
                    win_upper.push(if j > 0 { idx(e - 1, j - 1) } else { idx(e - 2, half - 1) });
                    win_lower.push(idx(e - 1, j));
                }
            }
        }
        let mut upper = vec![0.0; n + 2];
        let mut lower = vec![0.0; n + 2];
        upper[n] = 1.0;
        lower[n] = 1.0;
        let top_bound = tail_bound(p, 2f64.powi(cfg.top_binade + 1));
        Ok(GridBracket {
            p,
            cfg,
            level: 0,
            half,
            lo_binade,
            loss,
            win_upper,
            win_lower,
            upper,
            lower,
            spare_upper: Vec::new(),
            spare_lower: Vec::new(),
            top_bound,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn grid_len(&self) -> usize {
        self.loss.len()
    }

    pub fn advance(&mut self) {
        let n = self.loss.len();
        let (p, q) = (self.p, 1.0 - self.p);
        let mut nu = std::mem::take(&mut self.spare_upper);
        let mut nl = std::mem::take(&mut self.spare_lower);
        nu.resize(n + 2, 0.0);
        nl.resize(n + 2, 0.0);
        for i in 0..n {
            let l = self.loss[i] as usize;
            nu[i] = p * self.upper[self.win_upper[i] as usize] + q * self.upper[l];
            nl[i] = p * self.lower[self.win_lower[i] as usize] + q * self.lower[l];
        }
        self.level += 1;
        nu[n] = 1.0;
        nl[n] = 1.0;
        // f_k vanishes beyond X = 2^k - 1
        nu[n + 1] = if self.level <= (self.cfg.top_binade + 1) as u32 { 0.0 } else { self.top_bound };
        nl[n + 1] = 0.0;
        self.spare_upper = std::mem::replace(&mut self.upper, nu);
        self.spare_lower = std::mem::replace(&mut self.lower, nl);
    }

    pub fn advance_to(&mut self, level: u32) {
        while self.level < level {
            self.advance();
        }
    }

    /// Grid index of the largest grid point `<= v` and whether it equals `v`,
    /// for `v` inside the grid range.
    fn locate(&self, v: f64) -> (usize, bool) {
        let e = ((v.to_bits() >> 52) & 0x7ff) as i32 - 1023;
        let scaled = v * 2f64.powi(self.cfg.bits as i32 - 1 - e);
        let m = scaled.floor();
        let j = m as usize - self.half;
        ((e - self.lo_binade) as usize * self.half + j, m == scaled)
    }

    /// `(lower, upper)` bounds on `f_level(x)`.
    pub fn bounds(&self, x: f64) -> (f64, f64) {
        let v = x - 2.0;
        if v <= 0.0 {
            return (1.0, 1.0);
        }
        let n = self.loss.len();
        if v < 2f64.powi(self.lo_binade) {
            return (self.lower[0], 1.0);
        }
        if v >= 2f64.powi(self.cfg.top_binade + 1) {
            return (0.0, self.upper[n + 1]);
        }
        let (i, exact) = self.locate(v);
        if exact {
            return (self.lower[i], self.upper[i]);
        }
        let hi = if i + 1 < n { self.lower[i + 1] } else { 0.0 };
        (hi, self.upper[i])
    }
}

/// Bounds on `f_k(x, p)` for every `x` in `xs` and `k = 0 ..= n_max`.
pub fn grid_profiles(
    xs: &[f64],
    p: f64,
    n_max: u32,
    cfg: GridConfig,
) -> Result<Vec<BracketProfile>, RecError> {
    let mut grid = GridBracket::new(p, cfg)?;
    let mut out: Vec<BracketProfile> = xs
        .iter()
        .map(|&x| BracketProfile {
            x,
            lower: Vec::with_capacity(n_max as usize + 1),
            upper: Vec::with_capacity(n_max as usize + 1),
        })
        .collect();
    loop {
        for prof in out.iter_mut() {
            let (lo, hi) = grid.bounds(prof.x);
            prof.lower.push(lo);
            prof.upper.push(hi);
        }
        if grid.level() == n_max {
            break;
        }
        grid.advance();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::DyadicRational;
    use crate::ruinrec::{cumulative, gap_sequence};

    fn exact(x: f64, p: f64, n: u32) -> Vec<f64> {
        let gaps = gap_sequence(&DyadicRational::from_f64(x).unwrap(), &p, n).unwrap();
        cumulative(&gaps)
    }

    #[test]
    fn matches_exact_engine_on_grid_points() {
        let cfg = GridConfig {
            bits: 10,
            top_binade: 40,
        };
        let xs = [3.0, 2.25, 3.1875, 6.0, 2.0 + 1.0 / 1024.0];
        let prof = grid_profiles(&xs, 0.3, 18, cfg).unwrap();
        for pr in &prof {
            let ex = exact(pr.x, 0.3, 18);
            for k in 0..=18 {
                assert!((pr.lower[k] - ex[k]).abs() < 1e-13, "x={} k={k}", pr.x);
                assert!((pr.upper[k] - ex[k]).abs() < 1e-13, "x={} k={k}", pr.x);
            }
        }
    }

    #[test]
    fn coarse_grid_still_brackets() {
        let cfg = GridConfig {
            bits: 3,
            top_binade: 5,
        };
        let xs = [3.0, 3.3125, 4.7, 2.01, 200.0];
        let prof = grid_profiles(&xs, 0.35, 16, cfg).unwrap();
        for pr in &prof {
            let ex = exact(pr.x, 0.35, 16);
            for k in 0..=16 {
                assert!(pr.lower[k] <= ex[k] + 1e-15, "x={} k={k}", pr.x);
                assert!(ex[k] <= pr.upper[k] + 1e-15, "x={} k={k}", pr.x);
            }
        }
        assert!(prof[1].width(16) > 0.0);
    }

    #[test]
    fn doomed_start_is_one() {
        let g = GridBracket::new(0.3, GridConfig::default()).unwrap();
        assert_eq!(g.bounds(2.0), (1.0, 1.0));
        assert_eq!(g.bounds(-1.0), (1.0, 1.0));
    }

    #[test]
    fn tail_bound_shape() {
        assert_eq!(tail_bound(0.0, 10.0), 0.0);
        assert_eq!(tail_bound(0.5, 1e9), 1.0);
        let a = tail_bound(0.3, 1e6);
        let b = tail_bound(0.3, 1e12);
        assert!(b < a && a < 1.0);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = GridConfig {
            bits: 30,
            top_binade: 80,
        };
        assert!(GridBracket::new(0.3, cfg).is_err());
        assert!(GridBracket::new(1.5, GridConfig::default()).is_err());
    }
}
