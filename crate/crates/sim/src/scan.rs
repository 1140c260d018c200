//! Parameter scans: the hidden transition of the odd sublattice, the probe
//! ladder in `L` or `alpha`, and the nonzero-field uniqueness control.

use std::collections::BTreeMap;

use dyson_core::exact::Observable;
use dyson_core::mcmc::{ChainConfig, Estimate};
use dyson_core::{FrozenConstraint, Interval, ModelParams, Spin, TailRule};
use rayon::prelude::*;

use crate::error::{Result, SimError};
use crate::probe::{
    discontinuity_probe_on_streams, ladder_geometry, measure, PairEstimate, ProbeOptions, ProbeResult,
    STREAMS_PER_PROBE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScanAxis {
    Beta,
    L,
    Alpha,
    Volume,
}

impl ScanAxis {
    pub fn name(self) -> &'static str {
        match self {
            ScanAxis::Beta => "beta",
            ScanAxis::L => "L",
            ScanAxis::Alpha => "alpha",
            ScanAxis::Volume => "volume",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "beta" => Some(ScanAxis::Beta),
            "L" => Some(ScanAxis::L),
            "alpha" => Some(ScanAxis::Alpha),
            "volume" => Some(ScanAxis::Volume),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointOutcome {
    Probe(Box<ProbeResult>),
    /// Plus/minus outer-boundary pair on `sites` free spins.
    Pair {
        pair: PairEstimate,
        sites: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub value: f64,
    pub l: u64,
    pub outcome: PointOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub axis: ScanAxis,
    /// Sorted by `(value, l)`.
    pub points: Vec<ScanPoint>,
    pub warnings: Vec<String>,
}

impl ScanResult {
    fn new(axis: ScanAxis, mut points: Vec<ScanPoint>, warnings: Vec<String>) -> Self {
        points.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.l.cmp(&b.l)));
        Self { axis, points, warnings }
    }

    /// Gap estimate of every point, in order.
    pub fn gaps(&self) -> Vec<Estimate> {
        self.points
            .iter()
            .map(|p| match &p.outcome {
                PointOutcome::Probe(r) => r.gap,
                PointOutcome::Pair { pair, .. } => pair.gap,
            })
            .collect()
    }
}

/// Free odd sites `|x| <= 2L + 1`, the next `margin` odd sites on each side
/// frozen to `sign`, every even site of the hull alternating, alternating
/// continuation beyond.
pub fn hidden_constraint(l: u64, margin: u64, sign: Spin) -> Result<FrozenConstraint> {
    if margin == 0 {
        return Err(SimError::Usage("margin must be positive".into()));
    }
    let inner = 2 * l as i64 + 1;
    let outer = inner + 2 * margin as i64;
    let mut frozen = BTreeMap::new();
    let mut free = Vec::new();
    for x in -outer..=outer {
        if x.rem_euclid(2) == 0 {
            frozen.insert(x, Spin::alternating(x / 2));
        } else if x.abs() <= inner {
            free.push(x);
        } else {
            frozen.insert(x, sign);
        }
    }
    Ok(FrozenConstraint::new(frozen, free, TailRule::AlternatingEven)?)
}

/// Odd-sublattice magnetization under plus versus minus outer odd spins,
/// for every `beta` and `L`. The margin of frozen odd spins defaults to
/// `L + 1` per side.
pub fn hidden_transition_scan(
    params: &ModelParams,
    betas: &[f64],
    l_list: &[u64],
    margin: Option<u64>,
    chain: &ChainConfig,
    options: &ProbeOptions,
) -> Result<ScanResult> {
    chain.validate()?;
    let jobs: Vec<(f64, u64)> = betas.iter().flat_map(|&b| l_list.iter().map(move |&l| (b, l))).collect();
    let points: Vec<Result<ScanPoint>> = jobs
        .par_iter()
        .enumerate()
        .map(|(j, &(beta, l))| {
            let p = params.with_beta(beta)?;
            let m = margin.unwrap_or(l + 1);
            let plus = hidden_constraint(l, m, Spin::Up)?;
            let minus = hidden_constraint(l, m, Spin::Down)?;
            let obs = Observable::Average(plus.free_sites().to_vec());
            let a = measure(&p, &plus, &obs, chain, 2 * j as u64, options)?;
            let b = measure(&p, &minus, &obs, chain, 2 * j as u64 + 1, options)?;
            Ok(ScanPoint {
                value: beta,
                l,
                outcome: PointOutcome::Pair { pair: PairEstimate::new(a, b), sites: plus.free_sites().len() },
            })
        })
        .collect();
    Ok(ScanResult::new(ScanAxis::Beta, points.into_iter().collect::<Result<_>>()?, Vec::new()))
}

/// `sigma_0` on `[-R, R]` under all-plus versus all-minus boundaries for
/// every half-width `R`, at nonzero field.
pub fn uniqueness_control(
    params: &ModelParams,
    half_widths: &[u64],
    chain: &ChainConfig,
    options: &ProbeOptions,
) -> Result<ScanResult> {
    if params.h() == 0.0 {
        return Err(SimError::Usage("uniqueness_control needs h != 0".into()));
    }
    chain.validate()?;
    let points: Vec<Result<ScanPoint>> = half_widths
        .par_iter()
        .enumerate()
        .map(|(j, &r)| {
            let volume = Interval::centered(r);
            let plus = FrozenConstraint::interval(volume, TailRule::AllPlus);
            let minus = FrozenConstraint::interval(volume, TailRule::AllMinus);
            let obs = Observable::Spin(0);
            let a = measure(params, &plus, &obs, chain, 2 * j as u64, options)?;
            let b = measure(params, &minus, &obs, chain, 2 * j as u64 + 1, options)?;
            Ok(ScanPoint {
                value: volume.len() as f64,
                l: r,
                outcome: PointOutcome::Pair { pair: PairEstimate::new(a, b), sites: volume.len() },
            })
        })
        .collect();
    Ok(ScanResult::new(ScanAxis::Volume, points.into_iter().collect::<Result<_>>()?, Vec::new()))
}

/// How a probe ladder picks its geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LadderSpec {
    /// Used instead of the annulus law when `alpha > 2`.
    pub n_factor: Option<u64>,
    pub window_margin: Option<u64>,
}

/// Discontinuity probe for every `L`, with `N` from the annulus law capped
/// by the window budget.
pub fn probe_ladder(
    params: &ModelParams,
    l_list: &[u64],
    spec: &LadderSpec,
    chain: &ChainConfig,
    options: &ProbeOptions,
) -> Result<ScanResult> {
    ladder(ScanAxis::L, l_list.iter().map(|&l| (*params, l, l as f64)).collect(), spec, chain, options)
}

/// Discontinuity probe at a fixed `L` for every `alpha`.
pub fn alpha_scan(
    params: &ModelParams,
    alphas: &[f64],
    l: u64,
    spec: &LadderSpec,
    chain: &ChainConfig,
    options: &ProbeOptions,
) -> Result<ScanResult> {
    let jobs = alphas.iter().map(|&a| Ok((params.with_alpha(a)?, l, a))).collect::<Result<Vec<_>>>()?;
    ladder(ScanAxis::Alpha, jobs, spec, chain, options)
}

fn ladder(
    axis: ScanAxis,
    jobs: Vec<(ModelParams, u64, f64)>,
    spec: &LadderSpec,
    chain: &ChainConfig,
    options: &ProbeOptions,
) -> Result<ScanResult> {
    let mut warnings = Vec::new();
    let mut prepared = Vec::with_capacity(jobs.len());
    for (p, l, value) in jobs {
        let (g, w) = ladder_geometry(p.alpha(), l, spec.n_factor, spec.window_margin, options.max_free_sites)?;
        warnings.extend(w);
        prepared.push((p, g, value));
    }
    let points: Vec<Result<ScanPoint>> = prepared
        .par_iter()
        .enumerate()
        .map(|(j, (p, g, value))| {
            let r = discontinuity_probe_on_streams(p, g, chain, options, j as u64 * STREAMS_PER_PROBE)?;
            Ok(ScanPoint { value: *value, l: g.l(), outcome: PointOutcome::Probe(Box::new(r)) })
        })
        .collect();
    let points: Vec<ScanPoint> = points.into_iter().collect::<Result<_>>()?;
    for pt in &points {
        if let PointOutcome::Probe(r) = &pt.outcome {
            for w in &r.warnings {
                if !warnings.contains(w) {
                    warnings.push(w.clone());
                }
            }
        }
    }
    Ok(ScanResult::new(axis, points, warnings))
}
