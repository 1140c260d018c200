//! Brute-force finite-volume Gibbs kernels.
//!
//! Every query enumerates all `2^|Λ|` configurations of the free spins, so
//! volumes are capped at [`ENUMERATION_CAP`]. There is no sampling fallback:
//! an oversized query is an error.

use alloc::vec::Vec;

use crate::lattice::{ConstrainedModel, FrozenConstraint, Interval, ModelParams, Spin, TailRule};
use crate::math::{exp, ln, pairwise_sum};
use crate::{Error, Result};

/// Largest number of free spins enumerated (`2^20` states).
pub const ENUMERATION_CAP: usize = 20;

/// Largest boundary window for [`monotonicity_check`] (`2^12` patterns).
pub const BOUNDARY_PATTERN_CAP: usize = 12;

/// Local functions the oracle knows how to integrate. All have sup-norm 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Observable {
    /// `sigma_x`.
    Spin(i64),
    /// `sigma_x sigma_y`.
    Product(i64, i64),
    /// Indicator that every listed site carries the listed spin.
    Pattern(Vec<(i64, Spin)>),
    /// Mean spin over the listed sites.
    Average(Vec<i64>),
}

impl Observable {
    pub fn support(&self) -> Vec<i64> {
        match self {
            Observable::Spin(x) => alloc::vec![*x],
            Observable::Product(x, y) => alloc::vec![*x, *y],
            Observable::Pattern(p) => p.iter().map(|&(s, _)| s).collect(),
            Observable::Average(sites) => sites.clone(),
        }
    }

    /// Whether the function is coordinatewise nondecreasing.
    pub fn is_increasing(&self) -> bool {
        match self {
            Observable::Spin(_) => true,
            Observable::Product(x, y) => x == y,
            Observable::Pattern(p) => p.iter().all(|&(_, s)| s == Spin::Up),
            Observable::Average(_) => true,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        1.0
    }

    /// Resolve site labels to indices of `model`.
    pub fn bind(&self, model: &ConstrainedModel) -> Result<BoundObservable> {
        let idx = |s: i64| model.index_of(s).ok_or(Error::ObservableOutsideVolume(s));
        Ok(match self {
            Observable::Spin(x) => BoundObservable::Spin(idx(*x)?),
            Observable::Product(x, y) => BoundObservable::Product(idx(*x)?, idx(*y)?),
            Observable::Pattern(p) => {
                let mut ups = 0u64;
                let mut mask = 0u64;
                let mut sites = Vec::with_capacity(p.len());
                for &(s, spin) in p {
                    let k = idx(s)?;
                    sites.push((k, spin.value()));
                    if k < 64 {
                        mask |= 1 << k;
                        if spin == Spin::Up {
                            ups |= 1 << k;
                        }
                    }
                }
                BoundObservable::Pattern { mask, ups, sites }
            }
            Observable::Average(sites) => {
                if sites.is_empty() {
                    return Err(Error::EmptyWindow);
                }
                BoundObservable::Average(sites.iter().map(|&s| idx(s)).collect::<Result<_>>()?)
            }
        })
    }
}

/// An [`Observable`] with sites resolved to model indices.
#[derive(Debug, Clone)]
pub enum BoundObservable {
    Spin(usize),
    Product(usize, usize),
    Pattern { mask: u64, ups: u64, sites: Vec<(usize, i8)> },
    Average(Vec<usize>),
}

impl BoundObservable {
    /// Value on a configuration given as a bitmask (bit `a` set means `+1`).
    #[inline]
    pub fn eval_bits(&self, state: u64) -> f64 {
        let spin = |a: usize| if state >> a & 1 == 1 { 1.0 } else { -1.0 };
        match self {
            BoundObservable::Spin(a) => spin(*a),
            BoundObservable::Product(a, b) => spin(*a) * spin(*b),
            BoundObservable::Pattern { mask, ups, .. } => {
                if state & mask == *ups {
                    1.0
                } else {
                    0.0
                }
            }
            BoundObservable::Average(sites) => sites.iter().map(|&a| spin(a)).sum::<f64>() / sites.len() as f64,
        }
    }

    /// Value on a configuration given as `+-1` spins.
    #[inline]
    pub fn eval(&self, spins: &[i8]) -> f64 {
        match self {
            BoundObservable::Spin(a) => spins[*a] as f64,
            BoundObservable::Product(a, b) => (spins[*a] * spins[*b]) as f64,
            BoundObservable::Pattern { sites, .. } => {
                if sites.iter().all(|&(a, s)| spins[a] == s) {
                    1.0
                } else {
                    0.0
                }
            }
            BoundObservable::Average(sites) => {
                sites.iter().map(|&a| spins[a] as i64).sum::<i64>() as f64 / sites.len() as f64
            }
        }
    }
}

/// Free sites and boundary condition (via the constraint), observable and cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelQuery {
    pub constraint: FrozenConstraint,
    pub observable: Observable,
    pub cutoff: u64,
}

impl KernelQuery {
    pub fn new(constraint: FrozenConstraint, observable: Observable, cutoff: u64) -> Self {
        Self { constraint, observable, cutoff }
    }

    /// Free interval `volume` with boundary condition given by `tail` everywhere else.
    pub fn on_interval(volume: Interval, tail: TailRule, observable: Observable, cutoff: u64) -> Self {
        Self::new(FrozenConstraint::interval(volume, tail), observable, cutoff)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactResult {
    pub expectation: f64,
    /// `log Z` at the model's `beta`.
    pub log_partition: f64,
    /// Bound on the energy error from the field cutoff.
    pub tail_bound: f64,
}

pub fn gibbs_exact(params: &ModelParams, query: &KernelQuery) -> Result<ExactResult> {
    let n = query.constraint.free_sites().len();
    if n > ENUMERATION_CAP {
        return Err(Error::VolumeTooLarge { size: n, cap: ENUMERATION_CAP });
    }
    let model = ConstrainedModel::new(params, &query.constraint, query.cutoff)?;
    gibbs_exact_model(&model, &query.observable)
}

/// Exact expectation over all configurations of an already-built model.
pub fn gibbs_exact_model(model: &ConstrainedModel, observable: &Observable) -> Result<ExactResult> {
    let f = observable.bind(model)?;
    let table = Enumeration::new(model)?;
    let (expectation, log_partition) = table.expect(model.beta(), |s| f.eval_bits(s));
    Ok(ExactResult { expectation, log_partition, tail_bound: model.tail_bound() })
}

/// Energies of all `2^n` configurations, indexed by bitmask.
struct Enumeration {
    energies: Vec<f64>,
}

impl Enumeration {
    fn new(model: &ConstrainedModel) -> Result<Self> {
        let n = model.len();
        if n > ENUMERATION_CAP {
            return Err(Error::VolumeTooLarge { size: n, cap: ENUMERATION_CAP });
        }
        let mut j = alloc::vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                j[a * n + b] = model.coupling(a, b);
            }
        }
        let fields = model.fields();
        let states = 1usize << n;
        let mut energies = Vec::with_capacity(states);
        let mut spins = alloc::vec![0.0f64; n];
        for s in 0..states {
            for (a, v) in spins.iter_mut().enumerate() {
                *v = if s >> a & 1 == 1 { 1.0 } else { -1.0 };
            }
            let mut pair = 0.0;
            let mut single = 0.0;
            for a in 0..n {
                single += fields[a] * spins[a];
                let row = &j[a * n..(a + 1) * n];
                let mut r = 0.0;
                for b in a + 1..n {
                    r += row[b] * spins[b];
                }
                pair += spins[a] * r;
            }
            energies.push(-pair - single);
        }
        Ok(Self { energies })
    }

    /// `(E[f], log Z)` with log-sum-exp stabilization.
    fn expect(&self, beta: f64, f: impl Fn(u64) -> f64) -> (f64, f64) {
        let e_min = self.energies.iter().copied().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = self.energies.iter().map(|&e| exp(-beta * (e - e_min))).collect();
        let weighted: Vec<f64> = weights.iter().enumerate().map(|(s, &w)| w * f(s as u64)).collect();
        let z = pairwise_sum(&weights);
        (pairwise_sum(&weighted) / z, ln(z) - beta * e_min)
    }
}

/// `|gamma_outer gamma_inner f - gamma_outer f|` by enumerating both sides.
///
/// The outer volume is the free set of `constraint`; `inner` must be a subset.
pub fn dlr_check(
    params: &ModelParams,
    constraint: &FrozenConstraint,
    inner: &[i64],
    observable: &Observable,
    cutoff: u64,
) -> Result<f64> {
    let outer = ConstrainedModel::new(params, constraint, cutoff)?;
    let n = outer.len();
    if n > ENUMERATION_CAP {
        return Err(Error::VolumeTooLarge { size: n, cap: ENUMERATION_CAP });
    }
    let mut inner_idx = Vec::with_capacity(inner.len());
    for &s in inner {
        inner_idx.push(outer.index_of(s).ok_or(Error::NotNested)?);
    }
    if inner_idx.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let direct = gibbs_exact_model(&outer, observable)?.expectation;

    let f_outer = observable.bind(&outer)?;
    let rest: Vec<usize> = (0..n).filter(|a| !inner_idx.contains(a)).collect();
    let table = Enumeration::new(&outer)?;
    let composed = table
        .expect(outer.beta(), |s| {
            let fixed: Vec<(usize, i8)> = rest.iter().map(|&a| (a, if s >> a & 1 == 1 { 1 } else { -1 })).collect();
            if fixed.is_empty() {
                return expectation_given(&outer, &f_outer, s, &[]);
            }
            let sub = outer.condition(&fixed).expect("sites come from the outer model");
            expectation_given(&sub, &f_outer, s, &rest)
        })
        .0;
    Ok((composed - direct).abs())
}

/// `gamma_inner f` where the inner model is `sub` and the remaining outer
/// spins are read from the outer state `s` at indices `rest`.
fn expectation_given(sub: &ConstrainedModel, f_outer: &BoundObservable, s: u64, rest: &[usize]) -> f64 {
    // Map inner configurations back to outer bitmasks so the outer-bound
    // observable can be evaluated directly.
    let inner_positions: Vec<usize> = {
        let mut v = Vec::with_capacity(sub.len());
        let mut k = 0usize;
        for a in 0..sub.len() + rest.len() {
            if !rest.contains(&a) {
                v.push(a);
                k += 1;
            }
        }
        debug_assert_eq!(k, sub.len());
        v
    };
    let fixed_bits: u64 = rest.iter().fold(0, |acc, &a| acc | (s & (1 << a)));
    let table = Enumeration::new(sub).expect("inner volume is below the cap");
    table
        .expect(sub.beta(), |t| {
            let mut full = fixed_bits;
            for (k, &a) in inner_positions.iter().enumerate() {
                if t >> k & 1 == 1 {
                    full |= 1 << a;
                }
            }
            f_outer.eval_bits(full)
        })
        .0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityReport {
    /// Ordered pairs `omega <= omega'` with `gamma f(omega) > gamma f(omega') + 1e-12`.
    pub violations: u64,
    pub pairs_checked: u64,
    pub patterns: usize,
    pub min_expectation: f64,
    pub max_expectation: f64,
}

/// Tolerance for [`monotonicity_check`].
pub const MONOTONICITY_TOLERANCE: f64 = 1e-12;

/// Exhaustive FKG check: every boundary pattern on `boundary_window` (with
/// `tail` beyond), every comparable pair of patterns.
pub fn monotonicity_check(
    params: &ModelParams,
    volume: Interval,
    observable: &Observable,
    boundary_window: &[i64],
    tail: TailRule,
    cutoff: u64,
) -> Result<MonotonicityReport> {
    let k = boundary_window.len();
    if k > BOUNDARY_PATTERN_CAP {
        return Err(Error::VolumeTooLarge { size: k, cap: BOUNDARY_PATTERN_CAP });
    }
    if volume.len() > ENUMERATION_CAP {
        return Err(Error::VolumeTooLarge { size: volume.len(), cap: ENUMERATION_CAP });
    }
    let mut free: Vec<i64> = volume.sites().collect();
    for &b in boundary_window {
        if volume.contains(b) {
            return Err(Error::SiteFrozenAndFree(b));
        }
        free.push(b);
    }
    let joint = FrozenConstraint::new(Default::default(), free, tail)?;
    let model = ConstrainedModel::new(params, &joint, cutoff)?;
    let boundary_idx: Vec<usize> =
        boundary_window.iter().map(|&b| model.index_of(b).expect("boundary site is in the model")).collect();

    let patterns = 1usize << k;
    let mut values = Vec::with_capacity(patterns);
    for p in 0..patterns {
        let fixed: Vec<(usize, i8)> =
            boundary_idx.iter().enumerate().map(|(bit, &a)| (a, if p >> bit & 1 == 1 { 1 } else { -1 })).collect();
        let sub = model.condition(&fixed)?;
        values.push(gibbs_exact_model(&sub, observable)?.expectation);
    }

    let full = patterns - 1;
    let mut violations = 0;
    let mut pairs = 0;
    for lo in 0..patterns {
        let free_bits = full & !lo;
        // Enumerate every nonempty submask of the bits not set in `lo`.
        let mut sub = free_bits;
        while sub != 0 {
            let hi = lo | sub;
            pairs += 1;
            if values[lo] > values[hi] + MONOTONICITY_TOLERANCE {
                violations += 1;
            }
            sub = (sub - 1) & free_bits;
        }
    }
    Ok(MonotonicityReport {
        violations,
        pairs_checked: pairs,
        patterns,
        min_expectation: values.iter().copied().fold(f64::INFINITY, f64::min),
        max_expectation: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// `gamma_volume[f | +]`: plus boundary condition everywhere outside `volume`.
pub fn finite_volume_mu_plus(
    params: &ModelParams,
    volume: Interval,
    observable: &Observable,
    cutoff: u64,
) -> Result<f64> {
    let q = KernelQuery::on_interval(volume, TailRule::AllPlus, observable.clone(), cutoff);
    Ok(gibbs_exact(params, &q)?.expectation)
}

/// `gamma_volume[f | -]`.
pub fn finite_volume_mu_minus(
    params: &ModelParams,
    volume: Interval,
    observable: &Observable,
    cutoff: u64,
) -> Result<f64> {
    let q = KernelQuery::on_interval(volume, TailRule::AllMinus, observable.clone(), cutoff);
    Ok(gibbs_exact(params, &q)?.expectation)
}
