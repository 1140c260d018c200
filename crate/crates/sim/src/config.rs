//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, unknown and repeated keys
//! are errors. [`RunConfig::emit`] writes every resolved key, so its output
//! parses back to the same configuration.

use std::collections::HashMap;
use std::fmt::Write as _;

use dyson_core::exact::Observable;
use dyson_core::mcmc::{Algorithm, ChainConfig};
use dyson_core::{Error as ModelError, ModelParams, Spin, TailRule};

use crate::error::{Result, SimError};
use crate::probe::ExactMode;
use crate::scan::ScanAxis;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Exact,
    Sample,
    Probe,
    Scan,
    Check,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Exact => "exact",
            Command::Sample => "sample",
            Command::Probe => "probe",
            Command::Scan => "scan",
            Command::Check => "check",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "exact" => Some(Command::Exact),
            "sample" => Some(Command::Sample),
            "probe" => Some(Command::Probe),
            "scan" => Some(Command::Scan),
            "check" => Some(Command::Check),
            _ => None,
        }
    }

    pub fn needs_seed(self) -> bool {
        matches!(self, Command::Sample | Command::Probe | Command::Scan)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

/// Free sites for `exact` and `sample`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `[-volume, volume]` with `boundary` outside.
    Interval,
    /// The annulus probe geometry with `annulus_sign` and `tail`.
    Probe,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Interval => "interval",
            Domain::Probe => "probe",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "interval" => Some(Domain::Interval),
            "probe" => Some(Domain::Probe),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub model: ModelParams,
    pub domain: Domain,
    pub l: Option<u64>,
    pub n: Option<u64>,
    pub annulus_sign: Spin,
    pub window_margin: Option<u64>,
    pub tail: TailRule,
    pub volume: u64,
    pub boundary: TailRule,
    pub observable: Observable,
    pub sweeps: u64,
    pub burn_in: u64,
    pub seed: Option<u64>,
    pub algorithm: Algorithm,
    pub measure_every: u64,
    pub cutoff: u64,
    pub max_free_sites: u64,
    pub exact_path: ExactMode,
    pub scan: Option<ScanAxis>,
    pub scan_values: Vec<f64>,
    pub l_list: Vec<u64>,
    pub n_factor: Option<u64>,
    pub output: Option<String>,
    pub format: Format,
}

/// Every accepted key, in emission order.
pub const KEYS: &[&str] = &[
    "command",
    "alpha",
    "beta",
    "h",
    "geometry",
    "L",
    "N",
    "annulus_sign",
    "window_margin",
    "tail",
    "volume",
    "boundary",
    "observable",
    "sweeps",
    "burn_in",
    "seed",
    "algorithm",
    "measure_every",
    "cutoff",
    "max_free_sites",
    "exact_path",
    "scan",
    "scan_values",
    "L_list",
    "N_factor",
    "output",
    "format",
];

pub const DEFAULT_SWEEPS: u64 = 20_000;
pub const DEFAULT_BURN_IN: u64 = 2_000;
pub const DEFAULT_CUTOFF: u64 = 100_000;
pub const DEFAULT_MAX_FREE_SITES: u64 = 4096;
pub const DEFAULT_VOLUME: u64 = 4;

struct Entry {
    line: usize,
    value: String,
}

struct Document {
    entries: HashMap<String, Entry>,
    end_line: usize,
}

impl Document {
    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn parse<T>(&mut self, key: &str, f: impl FnOnce(&str) -> std::result::Result<T, String>) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => {
                f(&e.value).map(Some).map_err(|m| SimError::Config { line: e.line, message: format!("{key}: {m}") })
            }
        }
    }

    fn missing(&self, key: &str, why: &str) -> SimError {
        SimError::Config { line: self.end_line, message: format!("missing required key `{key}` ({why})") }
    }
}

fn tokenize(text: &str) -> Result<Document> {
    let mut entries = HashMap::new();
    let mut end_line = 1;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        end_line = line + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(SimError::Config { line, message: format!("expected `key = value`, got `{content}`") });
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(SimError::Config { line, message: format!("unknown key `{key}`") });
        }
        if value.is_empty() {
            return Err(SimError::Config { line, message: format!("{key}: empty value") });
        }
        if let Some(prev) = entries.insert(key.to_string(), Entry { line, value: value.to_string() }) {
            return Err(SimError::Config { line, message: format!("`{key}` already set on line {}", prev.line) });
        }
    }
    Ok(Document { entries, end_line })
}

fn real(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn count(s: &str) -> std::result::Result<u64, String> {
    s.parse().map_err(|_| format!("`{s}` is not a nonnegative integer"))
}

fn positive(s: &str) -> std::result::Result<u64, String> {
    match count(s)? {
        0 => Err("must be positive".into()),
        v => Ok(v),
    }
}

fn list<T>(s: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    s.split(',').map(|t| f(t.trim())).collect()
}

fn sign(s: &str) -> std::result::Result<Spin, String> {
    match s {
        "+1" | "1" | "+" | "plus" => Ok(Spin::Up),
        "-1" | "-" | "minus" => Ok(Spin::Down),
        _ => Err(format!("`{s}` is not +1 or -1")),
    }
}

fn tail(s: &str) -> std::result::Result<TailRule, String> {
    TailRule::from_name(s).ok_or_else(|| format!("`{s}` is not one of none, all-plus, all-minus, alternating-even"))
}

fn sign_name(s: Spin) -> &'static str {
    match s {
        Spin::Up => "+1",
        Spin::Down => "-1",
    }
}

pub fn parse_observable(s: &str) -> std::result::Result<Observable, String> {
    let site = |t: &str| t.trim().parse::<i64>().map_err(|_| format!("`{t}` is not a site"));
    let (kind, rest) = s.split_once(':').ok_or_else(|| format!("`{s}` is not kind:sites"))?;
    match kind {
        "spin" => Ok(Observable::Spin(site(rest)?)),
        "product" => {
            let (a, b) = rest.split_once(':').ok_or("product needs two sites")?;
            Ok(Observable::Product(site(a)?, site(b)?))
        }
        "average" => Ok(Observable::Average(list(rest, site)?)),
        "pattern" => Ok(Observable::Pattern(list(rest, |t| {
            let (x, v) = t.split_once(':').ok_or_else(|| format!("`{t}` is not site:sign"))?;
            Ok((site(x)?, sign(v.trim())?))
        })?)),
        _ => Err(format!("unknown observable kind `{kind}`")),
    }
}

pub fn observable_name(o: &Observable) -> String {
    let join = |v: Vec<String>| v.join(",");
    match o {
        Observable::Spin(x) => format!("spin:{x}"),
        Observable::Product(x, y) => format!("product:{x}:{y}"),
        Observable::Average(s) => format!("average:{}", join(s.iter().map(|x| x.to_string()).collect())),
        Observable::Pattern(p) => {
            format!("pattern:{}", join(p.iter().map(|(x, s)| format!("{x}:{}", sign_name(*s))).collect()))
        }
    }
}

fn model_error(line: usize, e: ModelError) -> SimError {
    SimError::Config { line, message: e.to_string() }
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut doc = tokenize(text)?;
    let command = doc
        .parse("command", |s| {
            Command::from_name(s).ok_or_else(|| format!("`{s}` is not one of exact, sample, probe, scan, check"))
        })?
        .ok_or_else(|| doc.missing("command", "exact, sample, probe, scan or check"))?;
    build(command, doc)
}

/// Like [`parse_config`], with `command` supplied from outside when absent.
pub fn parse_config_for(text: &str, command: Command) -> Result<RunConfig> {
    let mut doc = tokenize(text)?;
    doc.parse("command", |s| Command::from_name(s).ok_or_else(|| format!("`{s}` is not a command")))?;
    build(command, doc)
}

fn build(command: Command, mut doc: Document) -> Result<RunConfig> {
    let check = command == Command::Check;
    let alpha_line = doc.entries.get("alpha").map(|e| e.line).unwrap_or(doc.end_line);
    let beta_line = doc.entries.get("beta").map(|e| e.line).unwrap_or(doc.end_line);
    let h_line = doc.entries.get("h").map(|e| e.line).unwrap_or(doc.end_line);
    let alpha = match doc.parse("alpha", real)? {
        Some(a) => a,
        None if check => 1.5,
        None => return Err(doc.missing("alpha", "decay exponent, alpha > 1")),
    };
    let beta = match doc.parse("beta", real)? {
        Some(b) => b,
        None if check => 1.0,
        None => return Err(doc.missing("beta", "inverse temperature")),
    };
    let h = doc.parse("h", real)?.unwrap_or(0.0);
    ModelParams::new(alpha, 1.0, 0.0).map_err(|e| model_error(alpha_line, e))?;
    ModelParams::new(alpha, beta, 0.0).map_err(|e| model_error(beta_line, e))?;
    let model = ModelParams::new(alpha, beta, h).map_err(|e| model_error(h_line, e))?;

    let domain = doc
        .parse("geometry", |s| Domain::from_name(s).ok_or_else(|| format!("`{s}` is not interval or probe")))?
        .unwrap_or(Domain::Interval);
    let l = doc.parse("L", positive)?;
    let n = doc.parse("N", positive)?;
    let annulus_sign = doc.parse("annulus_sign", sign)?.unwrap_or(Spin::Up);
    let window_margin = doc.parse("window_margin", positive)?;
    let tail_rule = doc.parse("tail", tail)?.unwrap_or(TailRule::AlternatingEven);
    let volume = doc.parse("volume", count)?.unwrap_or(DEFAULT_VOLUME);
    let boundary = doc.parse("boundary", tail)?.unwrap_or(TailRule::AllPlus);
    let observable = doc.parse("observable", parse_observable)?.unwrap_or(Observable::Spin(0));

    let sweeps_line = doc.entries.get("sweeps").map(|e| e.line).unwrap_or(doc.end_line);
    let sweeps = doc.parse("sweeps", positive)?.unwrap_or(DEFAULT_SWEEPS);
    let burn_in = doc.parse("burn_in", count)?.unwrap_or(DEFAULT_BURN_IN.min(sweeps / 10));
    let seed = doc.parse("seed", count)?;
    let algorithm = doc
        .parse("algorithm", |s| Algorithm::from_name(s).ok_or_else(|| format!("`{s}` is not metropolis or cluster")))?
        .unwrap_or(Algorithm::Cluster);
    let measure_every = doc.parse("measure_every", positive)?.unwrap_or(1);
    ChainConfig::new(sweeps, burn_in, 0, algorithm, measure_every).map_err(|e| model_error(sweeps_line, e))?;

    let cutoff = doc.parse("cutoff", positive)?.unwrap_or(DEFAULT_CUTOFF);
    let max_free_sites = doc.parse("max_free_sites", positive)?.unwrap_or(DEFAULT_MAX_FREE_SITES);
    let exact_path = doc
        .parse("exact_path", |s| match s {
            "auto" => Ok(ExactMode::Auto),
            "never" => Ok(ExactMode::Never),
            _ => Err(format!("`{s}` is not auto or never")),
        })?
        .unwrap_or(ExactMode::Auto);
    let scan_line = doc.entries.get("scan").map(|e| e.line).unwrap_or(doc.end_line);
    let scan = doc.parse("scan", |s| {
        ScanAxis::from_name(s).ok_or_else(|| format!("`{s}` is not one of beta, L, alpha, volume"))
    })?;
    let scan_values = doc.parse("scan_values", |s| list(s, real))?.unwrap_or_default();
    let l_list = doc.parse("L_list", |s| list(s, positive))?.unwrap_or_default();
    let n_factor = doc.parse("N_factor", positive)?;
    let output = doc.parse("output", |s| Ok(s.to_string()))?;
    let format = doc
        .parse("format", |s| Format::from_name(s).ok_or_else(|| format!("`{s}` is not csv or json")))?
        .unwrap_or(Format::Csv);
    debug_assert!(doc.entries.is_empty());

    let cfg = RunConfig {
        command,
        model,
        domain,
        l,
        n,
        annulus_sign,
        window_margin,
        tail: tail_rule,
        volume,
        boundary,
        observable,
        sweeps,
        burn_in,
        seed,
        algorithm,
        measure_every,
        cutoff,
        max_free_sites,
        exact_path,
        scan,
        scan_values,
        l_list,
        n_factor,
        output,
        format,
    };
    cfg.validate_command(scan_line, doc.end_line)?;
    Ok(cfg)
}

impl RunConfig {
    fn validate_command(&self, scan_line: usize, end_line: usize) -> Result<()> {
        let err = |line: usize, m: &str| SimError::Config { line, message: m.to_string() };
        let needs_l = matches!(self.command, Command::Probe)
            || (matches!(self.command, Command::Exact | Command::Sample) && self.domain == Domain::Probe);
        if needs_l && self.l.is_none() {
            return Err(err(end_line, "missing required key `L` (central half-width)"));
        }
        if self.command == Command::Scan {
            let Some(axis) = self.scan else {
                return Err(err(end_line, "missing required key `scan` (beta, L, alpha or volume)"));
            };
            match axis {
                ScanAxis::Beta => {
                    if self.scan_values.is_empty() {
                        return Err(err(scan_line, "scan = beta needs scan_values (inverse temperatures)"));
                    }
                    if self.l_list.is_empty() && self.l.is_none() {
                        return Err(err(scan_line, "scan = beta needs L_list or L"));
                    }
                    if let Some(b) = self.scan_values.iter().find(|b| **b < 0.0) {
                        return Err(err(scan_line, &format!("scan_values: beta = {b} is negative")));
                    }
                }
                ScanAxis::L => {
                    if self.l_list.is_empty() {
                        return Err(err(scan_line, "scan = L needs L_list"));
                    }
                }
                ScanAxis::Alpha => {
                    if self.scan_values.is_empty() || self.l.is_none() {
                        return Err(err(scan_line, "scan = alpha needs scan_values (exponents) and L"));
                    }
                    if let Some(a) = self.scan_values.iter().find(|a| !(**a > 1.0)) {
                        return Err(err(scan_line, &format!("scan_values: alpha = {a} is not summable (alpha > 1)")));
                    }
                }
                ScanAxis::Volume => {
                    if self.scan_values.is_empty() {
                        return Err(err(scan_line, "scan = volume needs scan_values (half-widths)"));
                    }
                    if self.scan_values.iter().any(|v| *v < 0.0 || v.fract() != 0.0) {
                        return Err(err(scan_line, "scan_values: half-widths must be nonnegative integers"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Chain settings with the configured seed.
    pub fn chain(&self) -> Result<ChainConfig> {
        let seed = self.seed.ok_or_else(|| SimError::Usage(format!("`{}` needs a seed", self.command.name())))?;
        Ok(ChainConfig::new(self.sweeps, self.burn_in, seed, self.algorithm, self.measure_every)?)
    }

    /// `key = value` lines for every resolved setting.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        let join = |v: &[String]| v.join(",");
        put("command", self.command.name().into());
        put("alpha", self.model.alpha().to_string());
        put("beta", self.model.beta().to_string());
        put("h", self.model.h().to_string());
        put("geometry", self.domain.name().into());
        if let Some(l) = self.l {
            put("L", l.to_string());
        }
        if let Some(n) = self.n {
            put("N", n.to_string());
        }
        put("annulus_sign", sign_name(self.annulus_sign).into());
        if let Some(m) = self.window_margin {
            put("window_margin", m.to_string());
        }
        put("tail", self.tail.name().into());
        put("volume", self.volume.to_string());
        put("boundary", self.boundary.name().into());
        put("observable", observable_name(&self.observable));
        put("sweeps", self.sweeps.to_string());
        put("burn_in", self.burn_in.to_string());
        if let Some(s) = self.seed {
            put("seed", s.to_string());
        }
        put("algorithm", self.algorithm.name().into());
        put("measure_every", self.measure_every.to_string());
        put("cutoff", self.cutoff.to_string());
        put("max_free_sites", self.max_free_sites.to_string());
        put(
            "exact_path",
            match self.exact_path {
                ExactMode::Auto => "auto".into(),
                ExactMode::Never => "never".into(),
            },
        );
        if let Some(a) = self.scan {
            put("scan", a.name().into());
        }
        if !self.scan_values.is_empty() {
            put("scan_values", join(&self.scan_values.iter().map(|v| v.to_string()).collect::<Vec<_>>()));
        }
        if !self.l_list.is_empty() {
            put("L_list", join(&self.l_list.iter().map(|v| v.to_string()).collect::<Vec<_>>()));
        }
        if let Some(f) = self.n_factor {
            put("N_factor", f.to_string());
        }
        if let Some(o) = &self.output {
            put("output", o.clone());
        }
        put("format", self.format.name().into());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_probe_config_gets_defaults() {
        let c = parse_config("alpha = 1.5\nbeta = 5\ncommand = probe\nL = 8").unwrap();
        assert_eq!(c.command, Command::Probe);
        assert_eq!(c.model, ModelParams::new(1.5, 5.0, 0.0).unwrap());
        assert_eq!(c.l, Some(8));
        assert_eq!(c.sweeps, DEFAULT_SWEEPS);
        assert_eq!(c.tail, TailRule::AlternatingEven);
        assert_eq!(c.algorithm, Algorithm::Cluster);
        let text = c.emit();
        assert!(text.contains("cutoff = 100000\n"));
        assert!(text.contains("max_free_sites = 4096\n"));
        assert_eq!(parse_config(&text).unwrap(), c);
    }

    #[test]
    fn rejects_non_summable_alpha() {
        let e = parse_config("command = exact\nbeta = 1\nalpha = 0.9").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("alpha > 1"), "{msg}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn rejects_unknown_and_repeated_keys() {
        let e = parse_config("command = check\nunknown_key = 3").unwrap_err().to_string();
        assert!(e.contains("line 2") && e.contains("unknown_key"), "{e}");
        let e = parse_config("command = check\nh = 1\nh = 2").unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("already set on line 2"), "{e}");
    }

    #[test]
    fn missing_and_malformed_values() {
        let e = parse_config("alpha = 1.5\nbeta = 1").unwrap_err().to_string();
        assert!(e.contains("command"), "{e}");
        let e = parse_config("command = probe\nalpha = 1.5\nbeta = 1").unwrap_err().to_string();
        assert!(e.contains("`L`"), "{e}");
        let e = parse_config("command = exact\nalpha = 1.5\nbeta = x").unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("beta"), "{e}");
        let e =
            parse_config("command = sample\nalpha = 1.5\nbeta = 1\nsweeps = 10\nburn_in = 10").unwrap_err().to_string();
        assert!(e.contains("line 4"), "{e}");
        assert!(parse_config("command = exact\nalpha = 1.5\nbeta = 1\njust words").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = parse_config("# header\n\ncommand = check # trailing\n").unwrap();
        assert_eq!(c.command, Command::Check);
        assert_eq!(c.model.alpha(), 1.5);
    }

    #[test]
    fn observables_round_trip() {
        for s in ["spin:-3", "product:0:4", "average:-1,1,3", "pattern:0:+1,2:-1"] {
            assert_eq!(observable_name(&parse_observable(s).unwrap()), s);
        }
        assert!(parse_observable("spin").is_err());
        assert!(parse_observable("cube:1").is_err());
    }

    #[test]
    fn scan_requirements() {
        let base = "command = scan\nalpha = 1.5\nbeta = 1\n";
        assert!(parse_config(base).is_err());
        assert!(parse_config(&format!("{base}scan = beta\nscan_values = 0.5,1")).is_err());
        assert!(parse_config(&format!("{base}scan = beta\nscan_values = 0.5,1\nL_list = 2,4")).is_ok());
        assert!(parse_config(&format!("{base}scan = volume\nscan_values = 1.5")).is_err());
        assert!(parse_config(&format!("{base}scan = alpha\nscan_values = 0.5\nL = 2")).is_err());
    }
}
