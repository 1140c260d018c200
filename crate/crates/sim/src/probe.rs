//! The annulus probe: magnetization at the origin under plus and minus
//! annuli around a frozen alternating centre, with tail overrides.

use dyson_core::decimation::{boundary_bound, build_probe_constraint_with_tail, choose_n, ProbeGeometry};
use dyson_core::exact::{gibbs_exact_model, Observable, ENUMERATION_CAP};
use dyson_core::lattice::ConstrainedModel;
use dyson_core::mcmc::{run_model, ChainConfig, Estimate};
use dyson_core::{FrozenConstraint, ModelParams, Spin, TailRule};
use rayon::prelude::*;

use crate::error::{Result, SimError};

/// Tail rules every probe is evaluated under; the first is the default.
pub const PROBE_TAILS: [TailRule; 3] = [TailRule::AlternatingEven, TailRule::AllPlus, TailRule::AllMinus];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactMode {
    /// Enumerate whenever the free window fits the enumeration cap.
    Auto,
    Never,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProbeOptions {
    pub cutoff: u64,
    pub max_free_sites: u64,
    pub exact: ExactMode,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self { cutoff: 100_000, max_free_sites: 4096, exact: ExactMode::Auto }
    }
}

/// Plus/minus pair of estimates and their difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEstimate {
    pub plus: Estimate,
    pub minus: Estimate,
    pub gap: Estimate,
}

impl PairEstimate {
    pub fn new(plus: Estimate, minus: Estimate) -> Self {
        Self { plus, minus, gap: plus.minus(&minus) }
    }

    pub fn is_exact(&self) -> bool {
        self.plus.is_exact() && self.minus.is_exact()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailVariant {
    pub tail: TailRule,
    pub pair: PairEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub params: ModelParams,
    pub chain: ChainConfig,
    /// Geometry of the plus-annulus run.
    pub geometry: ProbeGeometry,
    pub m_plus: Estimate,
    pub m_minus: Estimate,
    pub gap: Estimate,
    pub boundary_bound_value: f64,
    /// Every tail rule of [`PROBE_TAILS`], default first.
    pub tail_variants: Vec<TailVariant>,
    pub exact: bool,
    pub warnings: Vec<String>,
}

impl ProbeResult {
    /// Largest shift of `M+` or `M-` caused by a tail override, and the
    /// combined standard error of that comparison.
    pub fn max_tail_shift(&self) -> (f64, f64) {
        let mut worst = (0.0, 0.0);
        for v in &self.tail_variants[1..] {
            for (a, b) in [(self.m_plus, v.pair.plus), (self.m_minus, v.pair.minus)] {
                let shift = (a.mean - b.mean).abs();
                let err = a.combined_error(&b);
                if shift - 3.0 * err > worst.0 - 3.0 * worst.1 {
                    worst = (shift, err);
                }
            }
        }
        worst
    }

    /// Whether every tail override moves `M+` and `M-` by less than the
    /// boundary bound plus three combined standard errors.
    pub fn tails_within_bound(&self) -> bool {
        self.tail_variants[1..].iter().all(|v| {
            [(self.m_plus, v.pair.plus), (self.m_minus, v.pair.minus)]
                .iter()
                .all(|(a, b)| (a.mean - b.mean).abs() < self.boundary_bound_value + 3.0 * a.combined_error(b))
        })
    }
}

/// `sigma_0` expectation under `constraint`, enumerated or sampled on `stream`.
pub(crate) fn measure(
    params: &ModelParams,
    constraint: &FrozenConstraint,
    observable: &Observable,
    chain: &ChainConfig,
    stream: u64,
    options: &ProbeOptions,
) -> Result<Estimate> {
    let model = ConstrainedModel::new(params, constraint, options.cutoff)?;
    if options.exact == ExactMode::Auto && model.len() <= ENUMERATION_CAP {
        Ok(Estimate::exact(gibbs_exact_model(&model, observable)?.expectation))
    } else {
        Ok(run_model(&model, observable, chain, stream)?)
    }
}

/// Streams `base .. base + 6` are used: `2k` for the plus annulus and
/// `2k + 1` for the minus annulus under the `k`-th tail of [`PROBE_TAILS`].
pub const STREAMS_PER_PROBE: u64 = 2 * PROBE_TAILS.len() as u64;

/// Essential-discontinuity probe of the alternating configuration.
pub fn discontinuity_probe(
    params: &ModelParams,
    geometry: &ProbeGeometry,
    chain: &ChainConfig,
    options: &ProbeOptions,
) -> Result<ProbeResult> {
    discontinuity_probe_on_streams(params, geometry, chain, options, 0)
}

pub(crate) fn discontinuity_probe_on_streams(
    params: &ModelParams,
    geometry: &ProbeGeometry,
    chain: &ChainConfig,
    options: &ProbeOptions,
    stream_base: u64,
) -> Result<ProbeResult> {
    chain.validate()?;
    let free = geometry.free_count();
    if free > options.max_free_sites {
        return Err(SimError::Budget { free, cap: options.max_free_sites });
    }
    let mut warnings = Vec::new();
    match choose_n(params.alpha(), geometry.l()) {
        Ok(n) if geometry.n() < n => warnings.push(format!(
            "N = {} is below the annulus law N(L) = {n}; the asymptotic claim is not being tested",
            geometry.n()
        )),
        Ok(_) => {}
        Err(_) => warnings.push(format!(
            "alpha = {} is outside the Dyson regime; N = {} is user-supplied",
            params.alpha(),
            geometry.n()
        )),
    }
    let plus = geometry.with_annulus_sign(Spin::Up);
    let jobs: Vec<(usize, Spin)> = (0..PROBE_TAILS.len()).flat_map(|k| [(k, Spin::Up), (k, Spin::Down)]).collect();
    let observable = Observable::Spin(0);
    let estimates: Vec<Result<Estimate>> = jobs
        .par_iter()
        .enumerate()
        .map(|(j, &(k, sign))| {
            let c = build_probe_constraint_with_tail(&plus.with_annulus_sign(sign), PROBE_TAILS[k]);
            measure(params, &c, &observable, chain, stream_base + j as u64, options)
        })
        .collect();
    let estimates: Vec<Estimate> = estimates.into_iter().collect::<Result<_>>()?;
    let tail_variants: Vec<TailVariant> = PROBE_TAILS
        .iter()
        .enumerate()
        .map(|(k, &tail)| TailVariant { tail, pair: PairEstimate::new(estimates[2 * k], estimates[2 * k + 1]) })
        .collect();
    let default = tail_variants[0].pair;
    Ok(ProbeResult {
        params: *params,
        chain: *chain,
        geometry: plus,
        m_plus: default.plus,
        m_minus: default.minus,
        gap: default.gap,
        boundary_bound_value: boundary_bound(params.alpha(), geometry.l(), geometry.n())?,
        exact: default.is_exact(),
        tail_variants,
        warnings,
    })
}

/// The same probe for `alpha > 2`, where the annulus law does not apply and
/// `N` comes from the caller.
pub fn alpha_control(
    params: &ModelParams,
    geometry: &ProbeGeometry,
    chain: &ChainConfig,
    options: &ProbeOptions,
) -> Result<ProbeResult> {
    if params.alpha() <= 2.0 {
        return Err(SimError::Usage(format!("alpha_control needs alpha > 2, got {}", params.alpha())));
    }
    discontinuity_probe(params, geometry, chain, options)
}

/// Largest `N <= wanted` whose window (with `margin`, or the default `2N`)
/// fits in `max_free_sites`. The flag is set when the budget binds.
pub fn budget_capped_n(l: u64, wanted: u64, margin: Option<u64>, max_free_sites: u64) -> Result<(u64, bool)> {
    let fits = |n: u64| -> Result<bool> {
        let g = match margin {
            Some(m) => ProbeGeometry::with_margin(l, n, Spin::Up, m)?,
            None => ProbeGeometry::new(l, n, Spin::Up)?,
        };
        Ok(g.free_count() <= max_free_sites)
    };
    if !fits(l)? {
        let free = match margin {
            Some(m) => ProbeGeometry::with_margin(l, l, Spin::Up, m)?.free_count(),
            None => ProbeGeometry::new(l, l, Spin::Up)?.free_count(),
        };
        return Err(SimError::Budget { free, cap: max_free_sites });
    }
    if fits(wanted)? {
        return Ok((wanted, false));
    }
    let (mut lo, mut hi) = (l, wanted);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, true))
}

/// Geometry for `L` with `N` from the annulus law (or `n_factor * L` when
/// `alpha > 2`), capped by the window budget.
pub fn ladder_geometry(
    alpha: f64,
    l: u64,
    n_factor: Option<u64>,
    margin: Option<u64>,
    max_free_sites: u64,
) -> Result<(ProbeGeometry, Vec<String>)> {
    let wanted = if alpha <= 2.0 {
        choose_n(alpha, l)?
    } else {
        let f = n_factor
            .ok_or_else(|| SimError::Usage("alpha > 2 needs N_factor (the annulus law is undefined)".into()))?;
        f.checked_mul(l).ok_or_else(|| SimError::Usage("N_factor * L overflows".into()))?
    };
    let (n, capped) = budget_capped_n(l, wanted, margin, max_free_sites)?;
    let mut warnings = Vec::new();
    if capped {
        warnings.push(format!(
            "L = {l}: max_free_sites = {max_free_sites} caps N at {n} < {wanted}; the asymptotic claim is not being tested"
        ));
    }
    let g = match margin {
        Some(m) => ProbeGeometry::with_margin(l, n, Spin::Up, m)?,
        None => ProbeGeometry::new(l, n, Spin::Up)?,
    };
    Ok((g, warnings))
}
