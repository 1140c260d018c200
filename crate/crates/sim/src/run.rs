//! Execution of a parsed [`RunConfig`].

use dyson_core::decimation::{build_probe_constraint_with_tail, ProbeGeometry};
use dyson_core::exact::{gibbs_exact, KernelQuery};
use dyson_core::lattice::ConstrainedModel;
use dyson_core::mcmc::run_model;
use dyson_core::{FrozenConstraint, Interval, Spin};

use crate::checks::all_suites;
use crate::config::{observable_name, Command, Domain, RunConfig};
use crate::error::{Result, SimError};
use crate::output::{Cell, Report};
use crate::probe::{alpha_control, discontinuity_probe, ladder_geometry, ProbeOptions, ProbeResult};
use crate::scan::{
    alpha_scan, hidden_transition_scan, probe_ladder, uniqueness_control, LadderSpec, PointOutcome, ScanAxis,
    ScanResult,
};

pub const PROBE_COLUMNS: [&str; 11] = [
    "L",
    "N",
    "annulus_sign",
    "tail_rule",
    "M_mean",
    "M_stderr",
    "gap_mean",
    "gap_stderr",
    "boundary_bound",
    "sweeps",
    "seed",
];

const PAIR_COLUMNS: [&str; 8] =
    ["sites", "M_plus_mean", "M_plus_stderr", "M_minus_mean", "M_minus_stderr", "gap_mean", "gap_stderr", "sweeps"];

fn options(cfg: &RunConfig) -> ProbeOptions {
    ProbeOptions { cutoff: cfg.cutoff, max_free_sites: cfg.max_free_sites, exact: cfg.exact_path }
}

fn report(cfg: &RunConfig, columns: Vec<&'static str>) -> Report {
    Report { config: cfg.clone(), meta: Vec::new(), warnings: Vec::new(), columns, rows: Vec::new(), failed: false }
}

/// Geometry of `exact`/`sample` on the probe domain and of `probe`.
fn geometry(cfg: &RunConfig) -> Result<(ProbeGeometry, Vec<String>)> {
    let l = cfg.l.ok_or_else(|| SimError::Usage("missing L".into()))?;
    let (g, warnings) = match cfg.n {
        Some(n) => {
            let g = match cfg.window_margin {
                Some(m) => ProbeGeometry::with_margin(l, n, Spin::Up, m)?,
                None => ProbeGeometry::new(l, n, Spin::Up)?,
            };
            (g, Vec::new())
        }
        None => ladder_geometry(cfg.model.alpha(), l, cfg.n_factor, cfg.window_margin, cfg.max_free_sites)?,
    };
    Ok((g.with_annulus_sign(cfg.annulus_sign), warnings))
}

fn domain_constraint(cfg: &RunConfig) -> Result<(FrozenConstraint, Vec<String>)> {
    match cfg.domain {
        Domain::Interval => Ok((FrozenConstraint::interval(Interval::centered(cfg.volume), cfg.boundary), Vec::new())),
        Domain::Probe => {
            let (g, w) = geometry(cfg)?;
            Ok((build_probe_constraint_with_tail(&g, cfg.tail), w))
        }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Report> {
    match cfg.command {
        Command::Exact => exact(cfg),
        Command::Sample => sample(cfg),
        Command::Probe => probe(cfg),
        Command::Scan => scan(cfg),
        Command::Check => check(cfg),
    }
}

fn exact(cfg: &RunConfig) -> Result<Report> {
    let (constraint, warnings) = domain_constraint(cfg)?;
    let sites = constraint.free_sites().len();
    let r = gibbs_exact(&cfg.model, &KernelQuery::new(constraint, cfg.observable.clone(), cfg.cutoff))?;
    let mut rep = report(cfg, vec!["observable", "expectation", "log_partition", "tail_bound", "free_sites"]);
    rep.warnings = warnings;
    rep.rows.push(vec![
        observable_name(&cfg.observable).into(),
        r.expectation.into(),
        r.log_partition.into(),
        r.tail_bound.into(),
        sites.into(),
    ]);
    Ok(rep)
}

fn sample(cfg: &RunConfig) -> Result<Report> {
    let chain = cfg.chain()?;
    let (constraint, warnings) = domain_constraint(cfg)?;
    let free = constraint.free_sites().len() as u64;
    if free > cfg.max_free_sites {
        return Err(SimError::Budget { free, cap: cfg.max_free_sites });
    }
    let model = ConstrainedModel::new(&cfg.model, &constraint, cfg.cutoff)?;
    let e = run_model(&model, &cfg.observable, &chain, 0)?;
    let mut rep = report(
        cfg,
        vec![
            "observable",
            "algorithm",
            "mean",
            "std_error",
            "n_samples",
            "autocorr_hint",
            "free_sites",
            "sweeps",
            "seed",
        ],
    );
    rep.warnings = warnings;
    rep.rows.push(vec![
        observable_name(&cfg.observable).into(),
        chain.algorithm.name().into(),
        e.mean.into(),
        e.std_error.into(),
        e.n_samples.into(),
        e.autocorr_hint.into(),
        free.into(),
        chain.sweeps.into(),
        Cell::Text(chain.seed.to_string()),
    ]);
    Ok(rep)
}

fn estimator(cfg: &RunConfig, exact: bool) -> String {
    if exact {
        "exact-enumeration".into()
    } else {
        cfg.algorithm.name().into()
    }
}

fn probe_rows(r: &ProbeResult, prefix: &[Cell]) -> Vec<Vec<Cell>> {
    let mut rows = Vec::new();
    for v in &r.tail_variants {
        for (sign, m) in [("+1", v.pair.plus), ("-1", v.pair.minus)] {
            let mut row = prefix.to_vec();
            row.extend([
                r.geometry.l().into(),
                r.geometry.n().into(),
                sign.into(),
                v.tail.name().into(),
                m.mean.into(),
                m.std_error.into(),
                v.pair.gap.mean.into(),
                v.pair.gap.std_error.into(),
                r.boundary_bound_value.into(),
                r.chain.sweeps.into(),
                Cell::Text(r.chain.seed.to_string()),
            ]);
            rows.push(row);
        }
    }
    rows
}

fn probe(cfg: &RunConfig) -> Result<Report> {
    let chain = cfg.chain()?;
    let (g, mut warnings) = geometry(cfg)?;
    let r = if cfg.model.alpha() > 2.0 {
        alpha_control(&cfg.model, &g, &chain, &options(cfg))?
    } else {
        discontinuity_probe(&cfg.model, &g, &chain, &options(cfg))?
    };
    warnings.extend(r.warnings.iter().cloned());
    let mut rep = report(cfg, PROBE_COLUMNS.to_vec());
    rep.meta.push(("estimator".into(), estimator(cfg, r.exact)));
    rep.warnings = warnings;
    rep.rows = probe_rows(&r, &[]);
    Ok(rep)
}

fn scan(cfg: &RunConfig) -> Result<Report> {
    let chain = cfg.chain()?;
    let opts = options(cfg);
    let spec = LadderSpec { n_factor: cfg.n_factor, window_margin: cfg.window_margin };
    let axis = cfg.scan.ok_or_else(|| SimError::Usage("missing scan".into()))?;
    let l_list = if cfg.l_list.is_empty() { cfg.l.into_iter().collect() } else { cfg.l_list.clone() };
    let result: ScanResult = match axis {
        ScanAxis::Beta => {
            hidden_transition_scan(&cfg.model, &cfg.scan_values, &l_list, cfg.window_margin, &chain, &opts)?
        }
        ScanAxis::L => probe_ladder(&cfg.model, &cfg.l_list, &spec, &chain, &opts)?,
        ScanAxis::Alpha => {
            let l = cfg.l.ok_or_else(|| SimError::Usage("missing L".into()))?;
            alpha_scan(&cfg.model, &cfg.scan_values, l, &spec, &chain, &opts)?
        }
        ScanAxis::Volume => {
            let widths: Vec<u64> = cfg.scan_values.iter().map(|v| *v as u64).collect();
            uniqueness_control(&cfg.model, &widths, &chain, &opts)?
        }
    };
    let mut columns: Vec<&'static str> = if axis == ScanAxis::L { vec![] } else { vec![axis.name()] };
    let mut rows = Vec::new();
    let mut all_exact = true;
    let mut any_exact = false;
    for p in &result.points {
        let value: Cell = match axis {
            ScanAxis::L | ScanAxis::Volume => (p.value as u64).into(),
            _ => p.value.into(),
        };
        match &p.outcome {
            PointOutcome::Probe(r) => {
                all_exact &= r.exact;
                any_exact |= r.exact;
                let prefix = if axis == ScanAxis::L { vec![] } else { vec![value] };
                rows.extend(probe_rows(r, &prefix));
            }
            PointOutcome::Pair { pair, sites } => {
                all_exact &= pair.is_exact();
                any_exact |= pair.is_exact();
                let mut row = vec![value];
                if axis == ScanAxis::Beta {
                    row.push(p.l.into());
                }
                row.extend([
                    (*sites).into(),
                    pair.plus.mean.into(),
                    pair.plus.std_error.into(),
                    pair.minus.mean.into(),
                    pair.minus.std_error.into(),
                    pair.gap.mean.into(),
                    pair.gap.std_error.into(),
                    chain.sweeps.into(),
                ]);
                rows.push(row);
            }
        }
    }
    match axis {
        ScanAxis::L | ScanAxis::Alpha => columns.extend(PROBE_COLUMNS),
        ScanAxis::Beta => {
            columns.push("L");
            columns.extend(PAIR_COLUMNS);
        }
        ScanAxis::Volume => columns.extend(PAIR_COLUMNS),
    }
    let mut rep = report(cfg, columns);
    let est = match (all_exact, any_exact) {
        (true, _) => "exact-enumeration".to_string(),
        (false, true) => format!("mixed: exact-enumeration where the window fits, {} otherwise", cfg.algorithm.name()),
        (false, false) => cfg.algorithm.name().to_string(),
    };
    rep.meta.push(("estimator".into(), est));
    rep.warnings = result.warnings;
    rep.rows = rows;
    Ok(rep)
}

fn check(cfg: &RunConfig) -> Result<Report> {
    let suites = all_suites(cfg.seed.unwrap_or(0))?;
    let mut rep = report(cfg, vec!["suite", "passed", "total", "worst", "tolerance", "gating", "status"]);
    for s in &suites {
        let status = match (s.ok(), s.gating) {
            (true, _) => "pass",
            (false, true) => "FAIL",
            (false, false) => "info",
        };
        rep.failed |= s.gating && !s.ok();
        rep.rows.push(vec![
            s.suite.into(),
            s.passed.into(),
            s.total.into(),
            s.worst.into(),
            s.tolerance.into(),
            if s.gating { "yes" } else { "no" }.into(),
            status.into(),
        ]);
    }
    Ok(rep)
}
