use alloc::vec::Vec;
use core::ops::Neg;

use crate::{Error, Result};

/// An Ising spin. `Down < Up`, which is the coordinatewise order used by FKG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    pub fn from_value(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Spin::Up),
            -1 => Ok(Spin::Down),
            other => Err(Error::InvalidSpin(other)),
        }
    }

    /// `Up` for `x >= 0`, `Down` otherwise.
    pub fn from_sign(x: f64) -> Self {
        if x < 0.0 {
            Spin::Down
        } else {
            Spin::Up
        }
    }

    /// `(-1)^k`.
    pub fn alternating(k: i64) -> Self {
        if k.rem_euclid(2) == 0 {
            Spin::Up
        } else {
            Spin::Down
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.value() as f64
    }
}

impl Neg for Spin {
    type Output = Spin;

    fn neg(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

/// Closed integer interval `[lo, hi]`, never empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: i64,
    hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::EmptyWindow);
        }
        Ok(Self { lo, hi })
    }

    /// `[-r, r]`.
    pub fn centered(r: u64) -> Self {
        Self { lo: -(r as i64), hi: r as i64 }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize + 1
    }

    pub fn contains(&self, site: i64) -> bool {
        self.lo <= site && site <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn hull(&self, site: i64) -> Interval {
        Interval { lo: self.lo.min(site), hi: self.hi.max(site) }
    }
}

/// Spins on the contiguous sites `offset .. offset + len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinWindow {
    offset: i64,
    spins: Vec<Spin>,
}

impl SpinWindow {
    pub fn new(offset: i64, spins: Vec<Spin>) -> Self {
        Self { offset, spins }
    }

    pub fn from_values(offset: i64, values: &[i64]) -> Result<Self> {
        let spins = values.iter().map(|&v| Spin::from_value(v)).collect::<Result<Vec<_>>>()?;
        Ok(Self { offset, spins })
    }

    pub fn uniform(interval: Interval, spin: Spin) -> Self {
        Self { offset: interval.lo(), spins: alloc::vec![spin; interval.len()] }
    }

    pub fn from_fn(interval: Interval, f: impl FnMut(i64) -> Spin) -> Self {
        Self { offset: interval.lo(), spins: interval.sites().map(f).collect() }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    pub fn interval(&self) -> Option<Interval> {
        if self.is_empty() {
            None
        } else {
            Some(Interval { lo: self.offset, hi: self.offset + self.spins.len() as i64 - 1 })
        }
    }

    pub fn get(&self, site: i64) -> Option<Spin> {
        let idx = site.checked_sub(self.offset)?;
        if idx < 0 {
            return None;
        }
        self.spins.get(idx as usize).copied()
    }

    /// `(site, spin)` pairs in increasing site order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Spin)> + '_ {
        self.spins.iter().enumerate().map(move |(k, &s)| (self.offset + k as i64, s))
    }

    pub fn flipped(&self) -> Self {
        Self { offset: self.offset, spins: self.spins.iter().map(|&s| -s).collect() }
    }

    pub fn shifted(&self, by: i64) -> Self {
        Self { offset: self.offset + by, spins: self.spins.clone() }
    }
}
