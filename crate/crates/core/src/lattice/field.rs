use alloc::vec::Vec;

use super::{CouplingTable, FrozenConstraint, ModelParams, Spin, SpinWindow, TailRule};
use crate::zeta::tail_upper_bound;
use crate::{Error, Result};

/// Per-site effective field on the free sites of a constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldProfile {
    sites: Vec<i64>,
    values: Vec<f64>,
    tail_bound: f64,
}

impl FieldProfile {
    /// Fields (including the homogeneous `h`) at every free site of `constraint`.
    pub fn build(params: &ModelParams, constraint: &FrozenConstraint, cutoff: u64) -> Self {
        let table = CouplingTable::new(params.alpha(), cutoff);
        let eval = FrozenField::new(constraint, &table);
        let sites = constraint.free_sites().to_vec();
        let mut values = Vec::with_capacity(sites.len());
        let mut tail_bound = 0.0;
        for &x in &sites {
            values.push(eval.field(x, cutoff) + params.h());
            tail_bound += eval.site_tail_bound(x, cutoff);
        }
        Self { sites, values, tail_bound }
    }

    pub fn sites(&self) -> &[i64] {
        &self.sites
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Bound on the total absolute field dropped by the cutoff, summed over sites.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn get(&self, site: i64) -> Option<f64> {
        self.sites.binary_search(&site).ok().map(|k| self.values[k])
    }
}

/// Field of the frozen spins of a constraint, evaluated with a dense copy of
/// the stored region.
pub(crate) struct FrozenField<'a> {
    tail: TailRule,
    lo: i64,
    hi: i64,
    dense: Vec<i8>,
    table: &'a CouplingTable,
}

impl<'a> FrozenField<'a> {
    pub(crate) fn new(constraint: &FrozenConstraint, table: &'a CouplingTable) -> Self {
        let stored = constraint.stored();
        let mut dense = alloc::vec![0i8; stored.len()];
        for (&site, &spin) in constraint.frozen() {
            dense[(site - stored.lo()) as usize] = spin.value();
        }
        Self { tail: constraint.tail(), lo: stored.lo(), hi: stored.hi(), dense, table }
    }

    #[inline]
    fn value(&self, site: i64) -> i32 {
        if site >= self.lo && site <= self.hi {
            self.dense[(site - self.lo) as usize] as i32
        } else {
            self.tail.spin_at(site).map_or(0, |s| s.value() as i32)
        }
    }

    /// `sum_{0 < |j - x| <= cutoff} J(|j - x|) omega_j`, summed in symmetric
    /// pairs `(x - d, x + d)` for increasing `d`, so a pair of opposite spins
    /// contributes exactly zero.
    pub(crate) fn field(&self, x: i64, cutoff: u64) -> f64 {
        debug_assert!(cutoff <= self.table.max_distance());
        let reach = ((x - self.lo).max(self.hi - x)).max(0) as u64;
        let inner_end = reach.min(cutoff);
        let mut acc = 0.0;
        for d in 1..=inner_end {
            let s = self.value(x - d as i64) + self.value(x + d as i64);
            if s != 0 {
                acc += s as f64 * self.table.get(d);
            }
        }
        if cutoff > inner_end {
            match self.tail {
                TailRule::None => {}
                TailRule::AllPlus => acc += 2.0 * self.table.range_sum(inner_end + 1, cutoff),
                TailRule::AllMinus => acc -= 2.0 * self.table.range_sum(inner_end + 1, cutoff),
                TailRule::AlternatingEven => {
                    for d in inner_end + 1..=cutoff {
                        let s = self.value(x - d as i64) + self.value(x + d as i64);
                        if s != 0 {
                            acc += s as f64 * self.table.get(d);
                        }
                    }
                }
            }
        }
        acc
    }

    /// Bound on `|sum_{|j - x| > cutoff} J omega_j|`.
    pub(crate) fn site_tail_bound(&self, x: i64, cutoff: u64) -> f64 {
        let reach = ((x - self.lo).max(self.hi - x)).max(0) as u64;
        if self.tail != TailRule::None || cutoff < reach {
            2.0 * tail_upper_bound(self.table.alpha(), cutoff)
        } else {
            0.0
        }
    }
}

/// `-sum_{i<j} |i-j|^-alpha s_i s_j - h sum_i s_i` over the window, no truncation.
pub fn hamiltonian_free(params: &ModelParams, window: &SpinWindow) -> Result<f64> {
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let table = CouplingTable::new(params.alpha(), window.len() as u64);
    let spins = window.spins();
    let mut pair = 0.0;
    let mut magnetization = 0.0;
    for (i, &si) in spins.iter().enumerate() {
        magnetization += si.as_f64();
        let mut row = 0.0;
        for (d, &sj) in spins[i + 1..].iter().enumerate() {
            row += table.get(d as u64 + 1) * (si.value() * sj.value()) as f64;
        }
        pair += row;
    }
    Ok(-pair - params.h() * magnetization)
}

/// Effective field at a free site: the frozen spins within `cutoff` plus `h`.
pub fn effective_field(params: &ModelParams, constraint: &FrozenConstraint, site: i64, cutoff: u64) -> Result<f64> {
    if !constraint.is_free(site) {
        return Err(Error::SiteNotFree(site));
    }
    let table = CouplingTable::new(params.alpha(), cutoff);
    Ok(FrozenField::new(constraint, &table).field(site, cutoff) + params.h())
}

/// Energy of `window` in the presence of the frozen spins of `constraint`,
/// truncated at `cutoff`, together with a bound on the truncation error.
pub fn hamiltonian_bc(
    params: &ModelParams,
    window: &SpinWindow,
    constraint: &FrozenConstraint,
    cutoff: u64,
) -> Result<(f64, f64)> {
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let required = constraint.explicit_extent();
    if cutoff < required {
        return Err(Error::CutoffTooSmall { cutoff, required });
    }
    for (site, _) in window.iter() {
        if !constraint.is_free(site) {
            return Err(Error::SiteNotFree(site));
        }
    }
    let free = hamiltonian_free(params, window)?;
    let table = CouplingTable::new(params.alpha(), cutoff);
    let eval = FrozenField::new(constraint, &table);
    let mut cross = 0.0;
    let mut tail_bound = 0.0;
    for (site, spin) in window.iter() {
        cross += spin.as_f64() * eval.field(site, cutoff);
        tail_bound += eval.site_tail_bound(site, cutoff);
    }
    Ok((free - cross, tail_bound))
}

/// Extremes of the effective field in the central interval and the annulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldBoundsReport {
    pub min_central: f64,
    pub max_central: f64,
    pub min_annulus: f64,
    pub max_annulus: f64,
    pub central_sites: usize,
    pub annulus_sites: usize,
}

/// Effective fields over the free odd sites of an annulus constraint.
///
/// `l` and `n` are half-widths on the decimated lattice, so the central
/// interval is `|x| <= 2l` and the annulus is `2l < |x| <= 2n` on the
/// original lattice. The origin is evaluated frozen at its alternating value
/// `+1`, which is the configuration whose neighborhood is being probed.
pub fn field_bounds_check(
    params: &ModelParams,
    l: u64,
    n: u64,
    constraint: &FrozenConstraint,
    cutoff: u64,
) -> Result<FieldBoundsReport> {
    if n <= l {
        return Err(Error::InvalidGeometry("annulus needs N > L"));
    }
    let fixed = if constraint.is_free(0) { constraint.freeze([(0, Spin::Up)])? } else { constraint.clone() };
    let table = CouplingTable::new(params.alpha(), cutoff);
    let eval = FrozenField::new(&fixed, &table);
    let (central, annulus) = (2 * l as i64, 2 * n as i64);
    let mut report = FieldBoundsReport {
        min_central: f64::INFINITY,
        max_central: f64::NEG_INFINITY,
        min_annulus: f64::INFINITY,
        max_annulus: f64::NEG_INFINITY,
        central_sites: 0,
        annulus_sites: 0,
    };
    for &x in fixed.free_sites() {
        let h = eval.field(x, cutoff) + params.h();
        if x.abs() <= central {
            report.min_central = report.min_central.min(h);
            report.max_central = report.max_central.max(h);
            report.central_sites += 1;
        } else if x.abs() <= annulus {
            report.min_annulus = report.min_annulus.min(h);
            report.max_annulus = report.max_annulus.max(h);
            report.annulus_sites += 1;
        }
    }
    Ok(report)
}
