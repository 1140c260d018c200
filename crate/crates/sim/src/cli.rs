//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::config::{parse_config_for, Command, Format};
use crate::error::{Result, SimError};
use crate::run::execute;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CommandArg {
    Exact,
    Sample,
    Probe,
    Scan,
    Check,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Exact => Command::Exact,
            CommandArg::Sample => Command::Sample,
            CommandArg::Probe => Command::Probe,
            CommandArg::Scan => Command::Scan,
            CommandArg::Check => Command::Check,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

/// Finite-volume sampler and probes for the decimated long-range Ising chain.
#[derive(Debug, Parser)]
#[command(name = "dyson", version)]
pub struct Args {
    /// What to run; overrides a `command` key in the config file.
    #[arg(value_enum)]
    pub command: CommandArg,
    /// Flat `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Chain seed; overrides `seed` in the config file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; overrides `output`. Standard output when neither is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; overrides `format`.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

/// Run the CLI and return the process exit code.
pub fn main_with(args: Args) -> i32 {
    match run(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(args: Args) -> Result<i32> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| SimError::Usage(format!("cannot read {}: {e}", path.display())))?,
        None => String::new(),
    };
    let command: Command = args.command.into();
    let mut cfg = parse_config_for(&text, command)?;
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.display().to_string());
    }
    if let Some(f) = args.format {
        cfg.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    if command.needs_seed() && cfg.seed.is_none() {
        return Err(SimError::Usage(format!("`{}` needs --seed or a `seed` key", command.name())));
    }
    let report = execute(&cfg)?;
    let text = report.render(cfg.format);
    match &cfg.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if report.failed {
        eprintln!("error: invariant violations, see the status column");
        return Ok(1);
    }
    Ok(0)
}
