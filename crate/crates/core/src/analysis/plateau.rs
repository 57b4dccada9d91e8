//! Plateau estimates of `f(x, p)`: the approximants `f_n` are doubled in depth
//! until `f_{2n} - f_n` drops below a tolerance.
//!
//! Fast mode runs on [`GridBracket`], which bounds `f_k` from both sides at
//! every level. The accepted gap is `upper_{2n} - lower_n`, an upper bound on
//! `f_{2n} - f_n`, and the reported value is `lower_{2n}`. Exact mode sums
//! the rational increments from the forward engine.

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::exactnum::{format_rational, rational_to_f64, BigRational, DyadicRational};
use crate::ruinrec::{doom_profile, GridBracket, GridConfig, Ring, DEFAULT_STATE_BUDGET};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateauEstimate {
    pub x: f64,
    pub p: f64,
    pub value: f64,
    pub n_used: u32,
    /// Bound on `|f_{n_used} - f_{n_used / 2}|` at acceptance.
    pub gap: f64,
    pub tolerance: f64,
    /// Width of the bracket around `f_{n_used}`; zero in exact mode.
    pub width: f64,
    /// Exact `f_{n_used}` as `"n/d"`, exact mode only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateauSettings {
    /// First depth compared against its double.
    pub n_start: u32,
    /// Largest `n` whose double is tried.
    pub n_cap: u32,
    pub grid: GridConfig,
}

impl Default for PlateauSettings {
    fn default() -> Self {
        PlateauSettings {
            n_start: 8,
            n_cap: 512,
            grid: GridConfig::default(),
        }
    }
}

fn check_inputs(p: f64, tolerance: f64, settings: &PlateauSettings) -> Result<(), AnalysisError> {
    if !(0.0..0.5).contains(&p) {
        return Err(AnalysisError::InvalidArgument(format!("p must lie in [0, 1/2), got {p}")));
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(AnalysisError::InvalidArgument(format!("tolerance must be positive, got {tolerance}")));
    }
    if settings.n_start == 0 || settings.n_cap < settings.n_start {
        return Err(AnalysisError::InvalidArgument(format!(
            "need 1 <= n_start <= n_cap, got {} and {}",
            settings.n_start, settings.n_cap
        )));
    }
    Ok(())
}

fn trivial(x: f64, p: f64, tolerance: f64) -> Option<PlateauEstimate> {
    let value = if x <= 2.0 {
        1.0
    } else if p == 0.0 {
        0.0
    } else {
        return None;
    };
    Some(PlateauEstimate {
        x,
        p,
        value,
        n_used: 0,
        gap: 0.0,
        tolerance,
        width: 0.0,
        exact: None,
    })
}

/// Plateau estimates for every `x` in `xs`, from a single grid pass.
pub fn plateau_estimates(
    xs: &[f64],
    p: f64,
    tolerance: f64,
    settings: &PlateauSettings,
) -> Result<Vec<PlateauEstimate>, AnalysisError> {
    check_inputs(p, tolerance, settings)?;
    if let Some(bad) = xs.iter().find(|x| !x.is_finite()) {
        return Err(AnalysisError::InvalidArgument(format!("x must be finite, got {bad}")));
    }
    let mut out: Vec<Option<PlateauEstimate>> = xs.iter().map(|&x| trivial(x, p, tolerance)).collect();
    if out.iter().all(Option::is_some) {
        return Ok(out.into_iter().flatten().collect());
    }
    let mut grid = GridBracket::new(p, settings.grid)?;
    let mut n = settings.n_start;
    grid.advance_to(n);
    let mut prev: Vec<f64> = xs.iter().map(|&x| grid.bounds(x).0).collect();
    let mut worst;
    loop {
        grid.advance_to(2 * n);
        worst = (f64::NAN, 0.0);
        for (i, &x) in xs.iter().enumerate() {
            if out[i].is_some() {
                continue;
            }
            let (lo, hi) = grid.bounds(x);
            let gap = (hi - prev[i]).max(0.0);
            if gap < tolerance {
                out[i] = Some(PlateauEstimate {
                    x,
                    p,
                    value: lo,
                    n_used: 2 * n,
                    gap,
                    tolerance,
                    width: hi - lo,
                    exact: None,
                });
            } else {
                if gap > worst.1 {
                    worst = (x, gap);
                }
                prev[i] = lo;
            }
        }
        if out.iter().all(Option::is_some) {
            return Ok(out.into_iter().flatten().collect());
        }
        if 2 * n > settings.n_cap {
            break;
        }
        n *= 2;
    }
    Err(AnalysisError::NonConvergent {
        x: worst.0,
        p,
        gap: worst.1,
        n: 2 * n,
        tolerance,
    })
}

/// Plateau estimate at one point in fast mode.
pub fn plateau_estimate_f(x: f64, p: f64, tolerance: f64, n_cap: u32) -> Result<PlateauEstimate, AnalysisError> {
    let settings = PlateauSettings {
        n_cap,
        n_start: PlateauSettings::default().n_start.min(n_cap.max(1)),
        ..PlateauSettings::default()
    };
    Ok(plateau_estimates(&[x], p, tolerance, &settings)?.remove(0))
}

/// Plateau estimate in exact arithmetic. `f_{2n} - f_n` is the exact sum of
/// the increments between the two depths.
pub fn plateau_estimate_exact(
    x: &DyadicRational,
    p: &BigRational,
    tolerance: &BigRational,
    settings: &PlateauSettings,
) -> Result<PlateauEstimate, AnalysisError> {
    let (pf, tf) = (rational_to_f64(p), rational_to_f64(tolerance));
    check_inputs(pf, tf, settings)?;
    if *p >= BigRational::new(1.into(), 2.into()) {
        return Err(AnalysisError::InvalidArgument(format!("p must lie in [0, 1/2), got {p}")));
    }
    let xf = x.to_f64();
    if let Some(mut t) = trivial(if *x <= DyadicRational::from_int(2) { 2.0 } else { xf }, pf, tf) {
        t.x = xf;
        t.exact = Some(format_rational(&if t.value == 1.0 { BigRational::one() } else { BigRational::zero() }));
        return Ok(t);
    }
    let mut n = settings.n_start;
    loop {
        let gaps = doom_profile(x, p, 2 * n, DEFAULT_STATE_BUDGET)?;
        let f_n = gaps[..n as usize].iter().fold(BigRational::zero(), |a, g| a.add(g));
        let diff = gaps[n as usize..].iter().fold(BigRational::zero(), |a, g| a.add(g));
        let f_2n = f_n.add(&diff);
        if diff < *tolerance {
            return Ok(PlateauEstimate {
                x: xf,
                p: pf,
                value: rational_to_f64(&f_2n),
                n_used: 2 * n,
                gap: rational_to_f64(&diff),
                tolerance: tf,
                width: 0.0,
                exact: Some(format_rational(&f_2n)),
            });
        }
        if 2 * n > settings.n_cap {
            return Err(AnalysisError::NonConvergent {
                x: xf,
                p: pf,
                gap: rational_to_f64(&diff),
                n: 2 * n,
                tolerance: tf,
            });
        }
        n *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse_rational;
    use crate::ruinrec::{cumulative, gap_sequence};

    fn small() -> PlateauSettings {
        PlateauSettings {
            n_start: 4,
            n_cap: 64,
            grid: GridConfig {
                bits: 12,
                top_binade: 40,
            },
        }
    }

    #[test]
    fn trivial_cases() {
        let est = plateau_estimates(&[2.0, 1.5], 0.3, 1e-6, &small()).unwrap();
        assert!(est.iter().all(|e| e.value == 1.0 && e.n_used == 0));
        let est = plateau_estimates(&[3.0], 0.0, 1e-6, &small()).unwrap();
        assert_eq!((est[0].value, est[0].n_used), (0.0, 0));
    }

    #[test]
    fn accepted_value_tracks_exact_approximant() {
        let est = plateau_estimates(&[3.0, 4.5], 0.1, 1e-3, &small()).unwrap();
        for e in &est {
            assert!(e.gap < e.tolerance && e.gap >= 0.0);
            let exact = cumulative(&gap_sequence(&DyadicRational::from_f64(e.x).unwrap(), &0.1, e.n_used).unwrap());
            let f = exact[e.n_used as usize];
            assert!(e.value <= f + 1e-15 && f - e.value <= e.width + 1e-15);
            assert!((0.0..=1.0).contains(&e.value));
        }
    }

    #[test]
    fn exact_mode_agrees_with_fast_mode() {
        let x = DyadicRational::from_int(3);
        let p = parse_rational("1/10").unwrap();
        let tol = parse_rational("1/1000").unwrap();
        let ex = plateau_estimate_exact(&x, &p, &tol, &small()).unwrap();
        let fast = plateau_estimates(&[3.0], 0.1, 1e-3, &small()).unwrap().remove(0);
        assert!(ex.exact.is_some());
        assert_eq!(ex.n_used, fast.n_used);
        assert!((ex.value - fast.value).abs() < 1e-12);
    }

    #[test]
    fn cap_reached_is_nonconvergent() {
        let s = PlateauSettings {
            n_start: 2,
            n_cap: 4,
            ..small()
        };
        let err = plateau_estimates(&[3.0], 0.45, 1e-9, &s).unwrap_err();
        assert!(matches!(err, AnalysisError::NonConvergent { n: 8, .. }));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(plateau_estimate_f(3.0, 0.5, 1e-6, 64).is_err());
        assert!(plateau_estimate_f(3.0, 0.3, 0.0, 64).is_err());
        assert!(plateau_estimates(&[f64::NAN], 0.3, 1e-6, &small()).is_err());
    }
}
