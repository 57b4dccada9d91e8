//! Top-down evaluation of `f_n(x, p)` with memoization on the dyadic orbit
//! of `x`. Generic over the value ring, so the same recursion yields doubles,
//! exact rationals or exact polynomials in `p`.

use std::collections::HashMap;

use crate::exactnum::{map_lose, map_win, DyadicRational, DEFAULT_EXPONENT_LIMIT};

use super::value::Ring;
use super::{PolyP, RecError};

/// Default cap on the number of cached entries.
pub const DEFAULT_MEMO_BUDGET: usize = 1 << 24;

/// Cached values keyed by canonical `x`, one map per recursion level.
#[derive(Debug, Clone)]
pub struct MemoTable<V> {
    levels: Vec<HashMap<DyadicRational, V>>,
    entries: usize,
    budget: usize,
    hits: u64,
}

impl<V: Clone> MemoTable<V> {
    pub fn new(budget: usize) -> Self {
        MemoTable {
            levels: Vec::new(),
            entries: 0,
            budget,
            hits: 0,
        }
    }

    pub fn get(&mut self, x: &DyadicRational, n: u32) -> Option<V> {
        let v = self.levels.get(n as usize)?.get(x).cloned();
        if v.is_some() {
            self.hits += 1;
        }
        v
    }

    pub fn insert(&mut self, x: DyadicRational, n: u32, v: V) -> Result<(), RecError> {
        let n = n as usize;
        if self.levels.len() <= n {
            self.levels.resize_with(n + 1, HashMap::new);
        }
        if self.levels[n].insert(x, v).is_none() {
            self.entries += 1;
            if self.entries > self.budget {
                return Err(RecError::BudgetExceeded {
                    what: "memo entries",
                    limit: self.budget,
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries == 0
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }
}

/// Memoized evaluator for a fixed `p` (a number, or the monomial `p` for the
/// polynomial engine).
#[derive(Debug, Clone)]
pub struct PointwiseEngine<V> {
    p: V,
    q: V,
    memo: MemoTable<V>,
    // thresholds[m] = 2^m + 1: f_m vanishes beyond it
    thresholds: Vec<DyadicRational>,
}

impl<V: Ring> PointwiseEngine<V> {
    pub fn new(p: V) -> Self {
        Self::with_budget(p, DEFAULT_MEMO_BUDGET)
    }

    pub fn with_budget(p: V, budget: usize) -> Self {
        let q = p.complement();
        PointwiseEngine {
            p,
            q,
            memo: MemoTable::new(budget),
            thresholds: Vec::new(),
        }
    }

    pub fn memo(&self) -> &MemoTable<V> {
        &self.memo
    }

    fn threshold(&mut self, m: u32) -> &DyadicRational {
        while self.thresholds.len() <= m as usize {
            let k = self.thresholds.len() as i64;
            self.thresholds
                .push(&DyadicRational::pow2(k) + &DyadicRational::one());
        }
        &self.thresholds[m as usize]
    }

    /// `f_n(x, p)`.
    pub fn value(&mut self, x: &DyadicRational, n: u32) -> Result<V, RecError> {
        if *x <= DyadicRational::from_int(2) {
            return Ok(V::one());
        }
        if n == 0 || *x > *self.threshold(n) {
            return Ok(V::zero());
        }
        if let Some(v) = self.memo.get(x, n) {
            return Ok(v);
        }
        x.check_exponent(DEFAULT_EXPONENT_LIMIT)?;
        let win = self.value(&map_win(x), n - 1)?;
        let lose = self.value(&map_lose(x), n - 1)?;
        let v = self.p.mul(&win).add(&self.q.mul(&lose));
        self.memo.insert(x.clone(), n, v.clone())?;
        Ok(v)
    }
}

/// One-shot `f_n(x, p)` with a fresh memo table.
pub fn pointwise_fn<V: Ring>(x: &DyadicRational, p: &V, n: u32) -> Result<V, RecError> {
    PointwiseEngine::new(p.clone()).value(x, n)
}

/// Exact coefficients of `p -> f_n(x, p)`.
pub fn poly_fn(x: &DyadicRational, n: u32) -> Result<PolyP, RecError> {
    PointwiseEngine::new(PolyP::p()).value(x, n)
}
