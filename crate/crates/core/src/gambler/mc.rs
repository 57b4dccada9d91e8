use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_probability, run_path, GamblerError, PathState, RunOptions, StreamRng, Xi};
use crate::exactnum::DyadicRational;

/// Binomial proportion with its standard error and normal 95% interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub hits: u64,
    pub samples: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub ci95: [f64; 2],
}

impl McEstimate {
    pub fn from_counts(hits: u64, samples: u64) -> Self {
        let est = if samples == 0 { 0.0 } else { hits as f64 / samples as f64 };
        let se = if samples == 0 { 0.0 } else { (est * (1.0 - est) / samples as f64).sqrt() };
        McEstimate {
            hits,
            samples,
            estimate: est,
            stderr: se,
            ci95: [(est - 1.96 * se).max(0.0), (est + 1.96 * se).min(1.0)],
        }
    }

    /// Whether `value` lies within `sigmas` standard errors of the estimate.
    /// A zero standard error requires exact agreement.
    pub fn covers(&self, value: f64, sigmas: f64) -> bool {
        (self.estimate - value).abs() <= sigmas * self.stderr
    }
}

fn check_samples(samples: u64) -> Result<(), GamblerError> {
    if samples == 0 {
        return Err(GamblerError::InvalidArgument("samples must be at least 1".into()));
    }
    Ok(())
}

/// Fraction of paths doomed within `n` rounds: an unbiased estimate of
/// `f_n(x, p)`.
pub fn mc_ruin_by_n(
    x: &DyadicRational,
    p: f64,
    n: u64,
    samples: u64,
    seed: u64,
) -> Result<McEstimate, GamblerError> {
    check_probability("p", p)?;
    check_samples(samples)?;
    let hits = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<_, GamblerError> {
            let mut rng = StreamRng::new(seed, i);
            let out = run_path(x, p, n, &mut rng, RunOptions { stop_at_doom: true })?;
            Ok(u64::from(out.doomed_at.is_some_and(|d| d <= n)))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(McEstimate::from_counts(hits, samples))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventualSummary {
    pub samples: u64,
    pub doomed: u64,
    pub ruined: u64,
    pub censored: u64,
    pub doomed_frac: f64,
    pub ruined_frac: f64,
    pub censored_frac: f64,
}

/// Doomed, ruined and still-alive fractions at `horizon`.
pub fn mc_eventual(
    x: &DyadicRational,
    p: f64,
    horizon: u64,
    samples: u64,
    seed: u64,
) -> Result<EventualSummary, GamblerError> {
    check_probability("p", p)?;
    check_samples(samples)?;
    let (doomed, ruined) = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<_, GamblerError> {
            let mut rng = StreamRng::new(seed, i);
            let out = run_path(x, p, horizon, &mut rng, RunOptions::default())?;
            Ok((u64::from(out.doomed_at.is_some()), u64::from(out.ruined_at.is_some())))
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    let censored = samples - doomed;
    let frac = |c: u64| c as f64 / samples as f64;
    Ok(EventualSummary {
        samples,
        doomed,
        ruined,
        censored,
        doomed_frac: frac(doomed),
        ruined_frac: frac(ruined),
        censored_frac: frac(censored),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoomRuinSummary {
    pub samples: u64,
    pub doomed: u64,
    pub ruined_after_doom: u64,
    /// `ruined_after_doom / doomed`, or 1 when nothing was doomed.
    pub fraction: f64,
}

/// For paths doomed within `horizon`, how many reach `W <= 0` within
/// `post_steps` further rounds.
pub fn doom_then_ruin(
    x: &DyadicRational,
    p: f64,
    horizon: u64,
    post_steps: u64,
    samples: u64,
    seed: u64,
) -> Result<DoomRuinSummary, GamblerError> {
    check_probability("p", p)?;
    check_samples(samples)?;
    let (doomed, ruined) = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<_, GamblerError> {
            let mut rng = StreamRng::new(seed, i);
            let mut s = PathState::new(x);
            while s.n < horizon && !s.is_doomed() {
                s.step(Xi::draw(&mut rng, p))?;
            }
            let Some(d) = s.doomed_at else {
                return Ok((0, 0));
            };
            while !s.is_ruined() && s.n < d + post_steps {
                s.step(Xi::draw(&mut rng, p))?;
            }
            Ok((1, u64::from(s.is_ruined())))
        })
        .try_reduce(|| (0u64, 0u64), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    Ok(DoomRuinSummary {
        samples,
        doomed,
        ruined_after_doom: ruined,
        fraction: if doomed == 0 { 1.0 } else { ruined as f64 / doomed as f64 },
    })
}
