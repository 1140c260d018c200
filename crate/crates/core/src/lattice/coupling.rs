use alloc::vec::Vec;

use crate::math::powf;
use crate::{Error, ModelParams, Result};

/// The pair coupling `J(r) = r^-alpha`.
pub fn coupling(params: &ModelParams, r: u64) -> Result<f64> {
    if r == 0 {
        return Err(Error::SelfCoupling);
    }
    Ok(powf(r as f64, -params.alpha()))
}

/// `J(r)` for `r = 0..=max_distance` (with `J(0) = 0`) and its prefix sums.
#[derive(Debug, Clone)]
pub struct CouplingTable {
    alpha: f64,
    values: Vec<f64>,
    prefix: Vec<f64>,
}

impl CouplingTable {
    pub fn new(alpha: f64, max_distance: u64) -> Self {
        let n = max_distance as usize + 1;
        let mut values = Vec::with_capacity(n);
        let mut prefix = Vec::with_capacity(n);
        values.push(0.0);
        prefix.push(0.0);
        let mut acc = 0.0;
        for r in 1..n {
            let j = powf(r as f64, -alpha);
            acc += j;
            values.push(j);
            prefix.push(acc);
        }
        Self { alpha, values, prefix }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn max_distance(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    /// `J(r)`; zero at `r = 0`. Panics beyond the table.
    #[inline]
    pub fn get(&self, r: u64) -> f64 {
        self.values[r as usize]
    }

    /// `sum_{r = a}^{b} J(r)` for `1 <= a`, `b <= max_distance`; zero when `a > b`.
    #[inline]
    pub fn range_sum(&self, a: u64, b: u64) -> f64 {
        if a > b {
            0.0
        } else {
            self.prefix[b as usize] - self.prefix[a as usize - 1]
        }
    }
}
