//! Forward propagation of the normalized-wealth distribution.
//!
//! Starting from `Y_0 = x`, each round sends `Y` to `(Y+1)/2` with
//! probability `p` and to `2Y-2` otherwise. The mass that first enters
//! `Y <= 2` at round `k+1` is the gap `f_{k+1}(x,p) - f_k(x,p)`; computing it
//! directly avoids cancellation between two nearly equal `f` values.

use crate::exactnum::{map_lose, map_win, DyadicRational, DEFAULT_EXPONENT_LIMIT};

use super::value::Ring;
use super::RecError;

/// Default cap on the number of live states per round.
pub const DEFAULT_STATE_BUDGET: usize = 1 << 23;

/// Merges two ascending `(state, mass)` lists, summing masses of equal states.
fn merge_states<V: Ring>(
    a: Vec<(DyadicRational, V)>,
    b: Vec<(DyadicRational, V)>,
) -> Vec<(DyadicRational, V)> {
    let mut out: Vec<(DyadicRational, V)> = Vec::with_capacity(a.len() + b.len());
    let mut ia = a.into_iter().peekable();
    let mut ib = b.into_iter().peekable();
    loop {
        let next = match (ia.peek(), ib.peek()) {
            (Some(x), Some(y)) => {
                if x.0 <= y.0 {
                    ia.next()
                } else {
                    ib.next()
                }
            }
            (Some(_), None) => ia.next(),
            (None, Some(_)) => ib.next(),
            (None, None) => break,
        };
        let (y, m) = next.unwrap();
        match out.last_mut() {
            Some(last) if last.0 == y => last.1 = last.1.add(&m),
            _ => out.push((y, m)),
        }
    }
    out
}

/// First-doom probabilities `g_0 .. g_{n_max-1}` from starting fortune `x`.
///
/// States that can no longer reach `Y <= 2` within the horizon (`Y` above
/// `2^r + 1` with `r` rounds left) are discarded; they contribute to no gap.
pub fn doom_profile<V: Ring>(
    x: &DyadicRational,
    p: &V,
    n_max: u32,
    state_budget: usize,
) -> Result<Vec<V>, RecError> {
    let two = DyadicRational::from_int(2);
    let mut gaps = Vec::with_capacity(n_max as usize);
    if *x <= two {
        gaps.resize(n_max as usize, V::zero());
        return Ok(gaps);
    }
    let q = p.complement();
    let mut states = vec![(x.clone(), V::one())];
    for round in 1..=n_max {
        let remaining = (n_max - round) as i64;
        let reach = &DyadicRational::pow2(remaining) + &DyadicRational::one();
        let mut doom = V::zero();
        let mut wins = Vec::with_capacity(states.len());
        let mut losses = Vec::with_capacity(states.len());
        for (y, m) in &states {
            let w = map_win(y);
            let mw = m.mul(p);
            if w <= two {
                doom = doom.add(&mw);
            } else if w <= reach {
                wins.push((w, mw));
            }
            let l = map_lose(y);
            let ml = m.mul(&q);
            if l <= two {
                doom = doom.add(&ml);
            } else if l <= reach {
                losses.push((l, ml));
            }
        }
        gaps.push(doom);
        states = merge_states(wins, losses);
        if states.len() > state_budget {
            return Err(RecError::BudgetExceeded {
                what: "live states",
                limit: state_budget,
            });
        }
        if let Some((y, _)) = states.first() {
            y.check_exponent(DEFAULT_EXPONENT_LIMIT)?;
        }
        if states.is_empty() {
            gaps.resize(n_max as usize, V::zero());
            break;
        }
    }
    Ok(gaps)
}

/// Gaps `g_k = f_{k+1}(x,p) - f_k(x,p)` for `k = 0 .. n_max-1`.
pub fn gap_sequence<V: Ring>(x: &DyadicRational, p: &V, n_max: u32) -> Result<Vec<V>, RecError> {
    doom_profile(x, p, n_max, DEFAULT_STATE_BUDGET)
}

/// `f_0 .. f_{gaps.len()}` at `x > 2` from its gaps.
pub fn cumulative<V: Ring>(gaps: &[V]) -> Vec<V> {
    let mut out = Vec::with_capacity(gaps.len() + 1);
    let mut acc = V::zero();
    out.push(acc.clone());
    for g in gaps {
        acc = acc.add(g);
        out.push(acc.clone());
    }
    out
}

/// Geometric decay rate of `gaps[k_lo..=k_hi]`: `exp` of the least-squares
/// slope of `ln g_k` against `k`, over the strictly positive gaps. `None` if
/// fewer than two positive gaps are available.
pub fn tail_ratio(gaps: &[f64], k_lo: usize, k_hi: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = (k_lo..=k_hi.min(gaps.len().saturating_sub(1)))
        .filter(|&k| gaps[k] > 0.0)
        .map(|k| (k as f64, gaps[k].ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some((sxy / sxx).exp())
}
