//! Exact monotonicity of `f_n(x, p)` in `p`.

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::exactnum::{format_rational, rational_to_f64, BigRational, DyadicRational};
use crate::ruinrec::poly_fn;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityRow {
    pub p_lo: String,
    pub p_hi: String,
    pub f_lo: String,
    pub f_hi: String,
    pub f_lo_f64: f64,
    pub f_hi_f64: f64,
    pub nondecreasing: bool,
    /// `f_n(x, p_hi) > f_n(x, p_lo)`; only expected where `f_n(x, p_hi) > 0`.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub x: String,
    pub n: u32,
    pub rows: Vec<MonotonicityRow>,
    pub nondecreasing: bool,
    /// Every pair with `f_n(x, p_hi) > 0` is strict.
    pub strict_where_positive: bool,
}

/// Evaluates the exact polynomial `f_n(x, .)` on `p_grid` and compares
/// adjacent values.
pub fn monotonicity_report(
    x: &DyadicRational,
    p_grid: &[BigRational],
    n: u32,
) -> Result<MonotonicityReport, AnalysisError> {
    let zero = BigRational::from_integer(0.into());
    let half = BigRational::new(1.into(), 2.into());
    if p_grid.iter().any(|p| *p < zero || *p >= half) {
        return Err(AnalysisError::InvalidArgument("p grid must lie in [0, 1/2)".into()));
    }
    if p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalysisError::InvalidArgument("p grid must be strictly increasing".into()));
    }
    let poly = poly_fn(x, n)?;
    let vals: Vec<BigRational> = p_grid.iter().map(|p| poly.eval(p)).collect();
    let rows: Vec<MonotonicityRow> = (1..p_grid.len())
        .map(|i| MonotonicityRow {
            p_lo: format_rational(&p_grid[i - 1]),
            p_hi: format_rational(&p_grid[i]),
            f_lo: format_rational(&vals[i - 1]),
            f_hi: format_rational(&vals[i]),
            f_lo_f64: rational_to_f64(&vals[i - 1]),
            f_hi_f64: rational_to_f64(&vals[i]),
            nondecreasing: vals[i - 1] <= vals[i],
            strict: vals[i - 1] < vals[i],
        })
        .collect();
    Ok(MonotonicityReport {
        x: x.to_string(),
        n,
        nondecreasing: rows.iter().all(|r| r.nondecreasing),
        strict_where_positive: rows
            .iter()
            .zip(&vals[1..])
            .all(|(r, v)| r.strict || *v == zero),
        rows,
    })
}

/// `{step, 2 step, ...}` strictly below 1/2, as exact rationals `i / denom`.
pub fn uniform_p_grid(denom: u32) -> Vec<BigRational> {
    (1..)
        .map(|i| BigRational::new(i.into(), denom.into()))
        .take_while(|p| *p < BigRational::new(1.into(), 2.into()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_approximant_is_p() {
        let grid = uniform_p_grid(20);
        assert_eq!(grid.len(), 9);
        let r = monotonicity_report(&DyadicRational::from_int(3), &grid, 1).unwrap();
        assert!(r.nondecreasing && r.strict_where_positive);
        assert_eq!(r.rows[0].f_lo, "1/20");
        assert_eq!(r.rows[8 - 1].f_hi, "9/20");
    }

    #[test]
    fn zero_endpoint_is_below_everything() {
        let mut grid = vec![BigRational::from_integer(0.into())];
        grid.extend(uniform_p_grid(10));
        let r = monotonicity_report(&DyadicRational::from_int(3), &grid, 6).unwrap();
        assert_eq!(r.rows[0].f_lo, "0/1");
        assert!(r.nondecreasing && r.strict_where_positive);
    }

    #[test]
    fn flat_zero_is_not_strict_but_allowed() {
        // f_1(5, p) = 0: nothing can be lost in one round from far away
        let r = monotonicity_report(&DyadicRational::from_int(5), &uniform_p_grid(10), 1).unwrap();
        assert!(r.nondecreasing && r.strict_where_positive);
        assert!(r.rows.iter().all(|row| !row.strict));
    }

    #[test]
    fn rejects_bad_grid() {
        let x = DyadicRational::from_int(3);
        let g = vec![BigRational::new(1.into(), 4.into()), BigRational::new(1.into(), 5.into())];
        assert!(monotonicity_report(&x, &g, 2).is_err());
        assert!(monotonicity_report(&x, &[BigRational::new(1.into(), 2.into())], 2).is_err());
    }
}
