use serde::{Deserialize, Serialize};

use super::{check_probability, GamblerError, StreamRng};
use crate::exactnum::{DyadicRational, ExactError, DEFAULT_EXPONENT_LIMIT};

/// Outcome of one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Xi {
    Win,
    Loss,
}

impl Xi {
    pub fn from_sign(s: i8) -> Self {
        if s > 0 {
            Xi::Win
        } else {
            Xi::Loss
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Xi::Win => 1,
            Xi::Loss => -1,
        }
    }

    pub fn draw(rng: &mut StreamRng, p: f64) -> Self {
        Xi::from_sign(rng.rademacher(p))
    }
}

/// One trajectory: wealth `w`, next bet `b = 2^level`, the partial sum of
/// `S`, and the first doom and ruin times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathState {
    pub n: u64,
    pub w: DyadicRational,
    pub b: DyadicRational,
    pub level: i64,
    pub partial: DyadicRational,
    pub doomed_at: Option<u64>,
    pub ruined_at: Option<u64>,
    margin: DyadicRational,
}

impl PathState {
    pub fn new(x: &DyadicRational) -> Self {
        let margin = x - &DyadicRational::from_int(2);
        let zero = DyadicRational::zero();
        PathState {
            n: 0,
            w: x.clone(),
            b: DyadicRational::one(),
            level: 0,
            partial: zero.clone(),
            doomed_at: (zero >= margin).then_some(0),
            ruined_at: (x.signum() <= 0).then_some(0),
            margin,
        }
    }

    /// Starting fortune minus 2.
    pub fn margin(&self) -> &DyadicRational {
        &self.margin
    }

    pub fn is_doomed(&self) -> bool {
        self.doomed_at.is_some()
    }

    pub fn is_ruined(&self) -> bool {
        self.ruined_at.is_some()
    }

    /// Wealth in units of the next bet.
    pub fn y(&self) -> DyadicRational {
        self.w.mul_pow2(-self.level)
    }

    pub fn x_norm(&self) -> DyadicRational {
        &self.y() - &DyadicRational::from_int(2)
    }

    pub fn step(&mut self, xi: Xi) -> Result<(), GamblerError> {
        if self.is_ruined() {
            return Err(GamblerError::AlreadyRuined);
        }
        let next_level = self.level + xi.sign() as i64;
        if next_level.abs() > DEFAULT_EXPONENT_LIMIT {
            return Err(ExactError::ExponentOverflow {
                exponent: next_level,
                limit: DEFAULT_EXPONENT_LIMIT,
            }
            .into());
        }
        match xi {
            Xi::Win => {
                self.w = &self.w + &self.b;
                self.partial = &self.partial + &self.b;
                self.b = self.b.double();
            }
            Xi::Loss => {
                self.w = &self.w - &self.b;
                self.b = self.b.half();
            }
        }
        self.level = next_level;
        self.n += 1;
        if self.doomed_at.is_none() && self.partial >= self.margin {
            self.doomed_at = Some(self.n);
        }
        if self.ruined_at.is_none() && self.w.signum() <= 0 {
            self.ruined_at = Some(self.n);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RunOptions {
    /// End the path as soon as it is doomed.
    pub stop_at_doom: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathOutcome {
    pub doomed_at: Option<u64>,
    pub ruined_at: Option<u64>,
    pub steps: u64,
    /// Not doomed within the horizon.
    pub censored: bool,
}

/// Simulates up to `horizon` rounds, stopping early at ruin (and at doom if
/// requested).
pub fn run_path(
    x: &DyadicRational,
    p: f64,
    horizon: u64,
    rng: &mut StreamRng,
    opts: RunOptions,
) -> Result<PathOutcome, GamblerError> {
    check_probability("p", p)?;
    let mut s = PathState::new(x);
    while s.n < horizon && !s.is_ruined() && !(opts.stop_at_doom && s.is_doomed()) {
        s.step(Xi::draw(rng, p))?;
    }
    Ok(PathOutcome {
        doomed_at: s.doomed_at,
        ruined_at: s.ruined_at,
        steps: s.n,
        censored: s.doomed_at.is_none(),
    })
}

/// Checks, along one sampled path of `steps` rounds, that the normalized
/// wealth `X_n = W_n / B_{n+1} - 2` obtained from the wealth recursion, from
/// its own recursion, and from the closed form `2^-S_n (x - 2 - partial_n)`
/// coincide exactly.
pub fn verify_closed_form(
    x: &DyadicRational,
    p: f64,
    steps: u64,
    rng: &mut StreamRng,
) -> Result<bool, GamblerError> {
    check_probability("p", p)?;
    let two = DyadicRational::from_int(2);
    let one = DyadicRational::one();
    let margin = x - &two;
    let mut w = x.clone();
    let mut level: i64 = 0;
    let mut partial = DyadicRational::zero();
    let mut x_rec = margin.clone();
    for _ in 0..steps {
        let bet = DyadicRational::pow2(level);
        match Xi::draw(rng, p) {
            Xi::Win => {
                w = &w + &bet;
                partial = &partial + &bet;
                level += 1;
                x_rec = (&x_rec - &one).half();
            }
            Xi::Loss => {
                w = &w - &bet;
                level -= 1;
                x_rec = x_rec.double();
            }
        }
        if level.abs() > DEFAULT_EXPONENT_LIMIT {
            return Err(ExactError::ExponentOverflow {
                exponent: level,
                limit: DEFAULT_EXPONENT_LIMIT,
            }
            .into());
        }
        let from_wealth = &w.mul_pow2(-level) - &two;
        let closed = (&margin - &partial).mul_pow2(-level);
        if from_wealth != x_rec || closed != x_rec {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks the `Y` recursion and the three equivalent doom criteria on every
/// step of one sampled path, until ruin or `steps`.
pub fn verify_path_identities(
    x: &DyadicRational,
    p: f64,
    steps: u64,
    rng: &mut StreamRng,
) -> Result<bool, GamblerError> {
    check_probability("p", p)?;
    let one = DyadicRational::one();
    let two = DyadicRational::from_int(2);
    let mut s = PathState::new(x);
    while s.n < steps && !s.is_ruined() {
        let y_prev = s.y();
        let xi = Xi::draw(rng, p);
        s.step(xi)?;
        let y = s.y();
        let expected = match xi {
            Xi::Win => (&y_prev + &one).half(),
            Xi::Loss => (&y_prev - &one).double(),
        };
        let by_partial = s.partial >= *s.margin();
        let by_y = y <= two;
        if y != expected || s.is_doomed() != by_partial || by_partial != by_y {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: u64,
    /// 0 on the initial row.
    pub xi: i8,
    pub w: DyadicRational,
    pub b: DyadicRational,
    pub level: i64,
    pub partial: DyadicRational,
}

/// Records a path row by row, starting with the initial state and ending at
/// ruin or after `steps` rounds.
pub fn trace_path(
    x: &DyadicRational,
    p: f64,
    steps: u64,
    rng: &mut StreamRng,
) -> Result<Vec<TraceRow>, GamblerError> {
    check_probability("p", p)?;
    let mut s = PathState::new(x);
    let row = |s: &PathState, xi: i8| TraceRow {
        n: s.n,
        xi,
        w: s.w.clone(),
        b: s.b.clone(),
        level: s.level,
        partial: s.partial.clone(),
    };
    let mut rows = vec![row(&s, 0)];
    while s.n < steps && !s.is_ruined() {
        let xi = Xi::draw(rng, p);
        s.step(xi)?;
        rows.push(row(&s, xi.sign()));
    }
    Ok(rows)
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from("n,xi,W,B,level,partial\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{},{}\n", r.n, r.xi, r.w, r.b, r.level, r.partial));
    }
    out
}
