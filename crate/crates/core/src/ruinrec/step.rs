//! Exact step-function representation of `x -> f_n(x, p)`.
//!
//! Pieces are left-open and right-closed: `values[i]` holds on
//! `(breakpoints[i-1], breakpoints[i]]`, the first piece extends to minus
//! infinity and the function is zero to the right of the last breakpoint.
//! Both inverse maps send `(a, b]` to `(a', b']`, so the convention is
//! preserved by refinement.

use serde::{Deserialize, Serialize};

use crate::exactnum::{
    format_rational, map_lose, map_win, parse_rational, premap_lose, premap_win, BigRational,
    DyadicRational, DEFAULT_EXPONENT_LIMIT,
};

use super::value::{Probability, ValueMode};
use super::RecError;

/// Default cap on the number of breakpoints a refinement may produce.
pub const DEFAULT_BREAKPOINT_BUDGET: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction<V> {
    breakpoints: Vec<DyadicRational>,
    values: Vec<V>,
}

impl<V: Probability> StepFunction<V> {
    /// `f_0 = 1` on `(-inf, 2]`, zero after.
    pub fn initial() -> Self {
        StepFunction {
            breakpoints: vec![DyadicRational::from_int(2)],
            values: vec![V::one()],
        }
    }

    pub fn from_parts(breakpoints: Vec<DyadicRational>, values: Vec<V>) -> Result<Self, RecError> {
        let f = StepFunction {
            breakpoints,
            values,
        };
        f.validate()?;
        Ok(f)
    }

    /// Checks the canonical-form invariants: nonempty, leading value 1 up to
    /// at least 2, strictly increasing breakpoints, values in `[0, 1]`
    /// strictly decreasing, and no trailing zero piece.
    pub fn validate(&self) -> Result<(), RecError> {
        let invalid = |msg: String| Err(RecError::InvalidStepFunction(msg));
        if self.breakpoints.is_empty() || self.breakpoints.len() != self.values.len() {
            return invalid(format!(
                "{} breakpoints but {} values",
                self.breakpoints.len(),
                self.values.len()
            ));
        }
        if self.values[0] != V::one() {
            return invalid("leading piece must have value 1".into());
        }
        if self.breakpoints[0] < DyadicRational::from_int(2) {
            return invalid("first breakpoint lies below 2".into());
        }
        if let Some(i) = self.breakpoints.windows(2).position(|w| w[0] >= w[1]) {
            return invalid(format!("breakpoints not increasing at index {}", i + 1));
        }
        let (zero, one) = (V::zero(), V::one());
        if let Some(v) = self.values.iter().find(|v| **v < zero || **v > one) {
            return invalid(format!("value {v:?} outside [0, 1]"));
        }
        if let Some(i) = self.values.windows(2).position(|w| w[0] <= w[1]) {
            return invalid(format!("values not strictly decreasing at index {}", i + 1));
        }
        if self.values.last().is_some_and(|v| v.is_zero()) {
            return invalid("trailing zero piece".into());
        }
        Ok(())
    }

    pub fn breakpoints(&self) -> &[DyadicRational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    pub fn mode(&self) -> ValueMode {
        V::MODE
    }

    /// Index of the piece containing `x`, or `len()` if `x` lies past the
    /// last breakpoint.
    pub fn piece_index(&self, x: &DyadicRational) -> usize {
        self.breakpoints.partition_point(|b| b < x)
    }

    pub fn eval(&self, x: &DyadicRational) -> V {
        match self.values.get(self.piece_index(x)) {
            Some(v) => v.clone(),
            None => V::zero(),
        }
    }

    pub fn to_record(&self, p: &BigRational, n: u32) -> StepRecord {
        StepRecord {
            p: format_rational(p),
            n,
            breakpoints: self.breakpoints.iter().map(|b| b.to_string()).collect(),
            values: self.values.iter().map(|v| v.encode()).collect(),
            mode: V::MODE,
        }
    }

    /// Decodes and validates a serialized step function.
    pub fn from_record(rec: &StepRecord) -> Result<(BigRational, u32, Self), RecError> {
        if rec.mode != V::MODE {
            return Err(RecError::InvalidStepFunction(format!(
                "stored mode {:?} does not match {:?}",
                rec.mode,
                V::MODE
            )));
        }
        let p = parse_rational(&rec.p)?;
        let breakpoints = rec
            .breakpoints
            .iter()
            .map(|b| b.parse())
            .collect::<Result<Vec<DyadicRational>, _>>()?;
        let values = rec
            .values
            .iter()
            .map(|v| {
                V::decode(v).ok_or_else(|| RecError::InvalidStepFunction(format!("bad value {v:?}")))
            })
            .collect::<Result<Vec<V>, _>>()?;
        Ok((p, rec.n, Self::from_parts(breakpoints, values)?))
    }
}

/// Serialized form of a step function together with the `p` and level it
/// was computed for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub p: String,
    pub n: u32,
    pub breakpoints: Vec<String>,
    pub values: Vec<String>,
    pub mode: ValueMode,
}

/// Merges two ascending lists, dropping duplicates.
fn merge_dedup(a: Vec<DyadicRational>, b: Vec<DyadicRational>) -> Vec<DyadicRational> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut ia = a.into_iter().peekable();
    let mut ib = b.into_iter().peekable();
    loop {
        let next = match (ia.peek(), ib.peek()) {
            (Some(x), Some(y)) => {
                if x <= y {
                    ia.next()
                } else {
                    ib.next()
                }
            }
            (Some(_), None) => ia.next(),
            (None, Some(_)) => ib.next(),
            (None, None) => break,
        };
        let next = next.unwrap();
        if out.last() != Some(&next) {
            out.push(next);
        }
    }
    out
}

/// One step of the recursion: `f_{n+1}(x) = p f_n((x+1)/2) + (1-p) f_n(2x-2)`.
pub fn refine_step<V: Probability>(
    f: &StepFunction<V>,
    p: &V,
    budget: usize,
) -> Result<StepFunction<V>, RecError> {
    f.validate()?;
    if *p < V::zero() || *p > V::one() {
        return Err(RecError::InvalidArgument(format!("p = {p:?} outside [0, 1]")));
    }
    let q = p.complement();
    let two = DyadicRational::from_int(2);

    let from_lose: Vec<_> = f.breakpoints.iter().map(premap_lose).collect();
    let from_win: Vec<_> = f.breakpoints.iter().map(premap_win).collect();
    let mut cands = merge_dedup(from_lose, from_win);
    // pieces at or below 2 all equal 1 and collapse into the leading piece
    cands.retain(|c| *c >= two);
    if cands.first() != Some(&two) {
        cands.insert(0, two.clone());
    }
    if cands.len() > budget {
        return Err(RecError::BudgetExceeded {
            what: "breakpoints",
            limit: budget,
        });
    }
    if let Some(last) = cands.last() {
        last.check_exponent(DEFAULT_EXPONENT_LIMIT)?;
    }

    // both images are increasing in the candidate, so two cursors suffice
    let (mut iw, mut il) = (0usize, 0usize);
    let bps = &f.breakpoints;
    let at = |i: usize| f.values.get(i).cloned().unwrap_or_else(V::zero);
    let mut out_b: Vec<DyadicRational> = Vec::with_capacity(cands.len());
    let mut out_v: Vec<V> = Vec::with_capacity(cands.len());
    for c in cands {
        let w = map_win(&c);
        let l = map_lose(&c);
        while iw < bps.len() && bps[iw] < w {
            iw += 1;
        }
        while il < bps.len() && bps[il] < l {
            il += 1;
        }
        let v = p.mul(&at(iw)).add(&q.mul(&at(il)));
        if out_v.last() == Some(&v) {
            // (a, b] and (b, c] with equal values merge into (a, c]
            *out_b.last_mut().unwrap() = c;
        } else {
            out_b.push(c);
            out_v.push(v);
        }
    }
    while out_v.last().is_some_and(|v| v.is_zero()) {
        out_v.pop();
        out_b.pop();
    }
    Ok(StepFunction {
        breakpoints: out_b,
        values: out_v,
    })
}

/// `f_n` by n-fold refinement of `f_0`.
pub fn iterate_step<V: Probability>(
    n: u32,
    p: &V,
    budget: usize,
) -> Result<StepFunction<V>, RecError> {
    let mut f = StepFunction::initial();
    for _ in 0..n {
        f = refine_step(&f, p, budget)?;
    }
    Ok(f)
}

/// Runs the refinement and hands every level `0..=n` to `visit`.
pub fn iterate_step_with<V: Probability>(
    n: u32,
    p: &V,
    budget: usize,
    mut visit: impl FnMut(u32, &StepFunction<V>),
) -> Result<StepFunction<V>, RecError> {
    let mut f = StepFunction::initial();
    visit(0, &f);
    for level in 1..=n {
        f = refine_step(&f, p, budget)?;
        visit(level, &f);
    }
    Ok(f)
}

pub fn eval_step<V: Probability>(f: &StepFunction<V>, x: &DyadicRational) -> V {
    f.eval(x)
}

fn abs_diff<V: Probability>(a: &V, b: &V) -> V {
    if a >= b {
        a.sub(b)
    } else {
        b.sub(a)
    }
}

/// Exact `sup |f - g|` over `[x_lo, x_hi]`. Both functions are constant on
/// every piece of the merged partition, so sampling `x_lo`, `x_hi` and every
/// breakpoint in between visits each piece.
pub fn sup_diff_steps<V: Probability>(
    f: &StepFunction<V>,
    g: &StepFunction<V>,
    x_lo: &DyadicRational,
    x_hi: &DyadicRational,
) -> V {
    let inside = |b: &&DyadicRational| *b >= x_lo && *b <= x_hi;
    let mut pts: Vec<&DyadicRational> = f
        .breakpoints
        .iter()
        .filter(inside)
        .chain(g.breakpoints.iter().filter(inside))
        .collect();
    pts.push(x_lo);
    pts.push(x_hi);
    let mut best = V::zero();
    for x in pts {
        let d = abs_diff(&f.eval(x), &g.eval(x));
        if d > best {
            best = d;
        }
    }
    best
}

/// `sup |f_m - f_n|` over `[x_lo, x_hi]` at a fixed `p`.
pub fn sup_diff<V: Probability>(
    n: u32,
    m: u32,
    p: &V,
    x_lo: &DyadicRational,
    x_hi: &DyadicRational,
    budget: usize,
) -> Result<V, RecError> {
    let mut fs = std::collections::BTreeMap::new();
    iterate_step_with(n.max(m), p, budget, |level, f| {
        if level == n || level == m {
            fs.insert(level, f.clone());
        }
    })?;
    Ok(sup_diff_steps(&fs[&n], &fs[&m], x_lo, x_hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> DyadicRational {
        s.parse().unwrap()
    }

    fn q(n: i64, den: i64) -> BigRational {
        BigRational::new(n.into(), den.into())
    }

    const B: usize = DEFAULT_BREAKPOINT_BUDGET;

    #[test]
    fn first_refinement() {
        let p = q(3, 10);
        let f1 = iterate_step(1, &p, B).unwrap();
        assert_eq!(f1.breakpoints(), &[d("2"), d("3")]);
        assert_eq!(f1.values(), &[q(1, 1), p.clone()]);
        assert_eq!(f1.eval(&d("3")), p);
        assert_eq!(f1.eval(&(d("3") + DyadicRational::pow2(-20))), q(0, 1));
    }

    #[test]
    fn second_level_at_four() {
        let p = q(2, 7);
        let f2 = iterate_step(2, &p, B).unwrap();
        let one = q(1, 1);
        assert_eq!(f2.eval(&d("4")), &p * &p);
        // partial sums after two rounds are 0, 1/2, 1 and 3
        assert_eq!(f2.breakpoints(), &[d("2"), d("5/2"), d("3"), d("5")]);
        assert_eq!(f2.values()[1], &p + &(&one - &p) * &p);
    }

    #[test]
    fn zero_p_collapses() {
        let f = iterate_step(6, &q(0, 1), B).unwrap();
        assert_eq!(f, StepFunction::initial());
    }

    #[test]
    fn certain_win_shifts_the_atom() {
        let f = iterate_step(3, &1.0f64, B).unwrap();
        assert_eq!(f.breakpoints(), &[d("9")]);
        assert_eq!(f.values(), &[1.0]);
    }

    #[test]
    fn boundary_pins() {
        let p = q(1, 3);
        for n in 0..9u32 {
            let f = iterate_step(n, &p, B).unwrap();
            assert_eq!(f.eval(&d("2")), q(1, 1));
            assert_eq!(f.eval(&d("-5")), q(1, 1));
            let top = DyadicRational::pow2(n as i64) + DyadicRational::one();
            assert_eq!(f.breakpoints().last(), Some(&top));
            assert_eq!(f.values().last().unwrap(), &num_traits::pow(p.clone(), n as usize));
            assert!(f.len() <= (1usize << n) + 1);
        }
    }

    #[test]
    fn sup_diff_hand_value() {
        // f_2 - f_1 is 0.21 on (2, 5/2], 0 on (5/2, 3] and 0.09 on (3, 7/2]
        let v = sup_diff(1, 2, &0.3f64, &d("5/2"), &d("7/2"), B).unwrap();
        assert!((v - 0.21).abs() < 1e-15);
        let lo = d("5/2") + DyadicRational::pow2(-20);
        let v = sup_diff(1, 2, &0.3f64, &lo, &d("7/2"), B).unwrap();
        assert!((v - 0.09).abs() < 1e-15);
        let same = sup_diff(4, 4, &0.3f64, &d("5/2"), &d("7/2"), B).unwrap();
        assert_eq!(same, 0.0);
    }

    #[test]
    fn validation_rejects_bad_input() {
        let unsorted = StepFunction::<f64>::from_parts(vec![d("3"), d("2")], vec![1.0, 0.5]);
        assert!(matches!(unsorted, Err(RecError::InvalidStepFunction(_))));
        let out_of_range = StepFunction::<f64>::from_parts(vec![d("2"), d("3")], vec![1.0, 1.5]);
        assert!(out_of_range.is_err());
        let trailing_zero = StepFunction::<f64>::from_parts(vec![d("2"), d("3")], vec![1.0, 0.0]);
        assert!(trailing_zero.is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let err = iterate_step(10, &0.3f64, 100).unwrap_err();
        assert!(matches!(err, RecError::BudgetExceeded { .. }));
    }

    #[test]
    fn record_round_trip() {
        let p = q(3, 10);
        let f = iterate_step(7, &p, B).unwrap();
        let rec = f.to_record(&p, 7);
        let (p2, n, g) = StepFunction::<BigRational>::from_record(&rec).unwrap();
        assert_eq!((p2, n), (p, 7));
        assert_eq!(g, f);
        assert!(StepFunction::<f64>::from_record(&rec).is_err());
    }
}
