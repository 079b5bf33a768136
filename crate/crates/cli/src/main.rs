//! `bcs`: figure-data generator for binary coherent state discrimination
//! and cloning.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bcs_core::analysis::Axis;
use bcs_core::cloners::{Scheme, TapReceiver};
use bcs_core::discrimination::ReceiverKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

mod commands;
mod config;
mod table;

use config::{parse_named, Format, RunConfig, Units, WignerState};
use table::Table;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] bcs_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Parser)]
#[command(name = "bcs", version, about = "Discrimination and cloning curves for binary coherent states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Error probabilities of the four receivers.
    DiscrimCurve,
    /// Mean cloning fidelity of each scheme against the optimal bound.
    FidelityCurve,
    /// Optimized parameters of each scheme.
    Params,
    /// Wigner function of a basis state or clone on a grid.
    Wigner(WignerArgs),
    /// Quadrature cumulants k1..k6 of the clones.
    Cumulants,
}

/// Every flag overrides the matching config key.
#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; a `<out>.config.json` sidecar is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for the Monte-Carlo homodyne check.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte-Carlo shots for the homodyne check (discrim-curve).
    #[arg(long, global = true)]
    mc_shots: Option<u64>,
    #[arg(long, global = true)]
    start: Option<f64>,
    #[arg(long, global = true)]
    stop: Option<f64>,
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Units of the grid and of the Wigner operating point.
    #[arg(long, global = true, value_enum)]
    units: Option<Units>,
    /// Comma-separated scheme names.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_named::<Scheme>)]
    schemes: Option<Vec<Scheme>>,
    #[arg(long, global = true, value_parser = parse_named::<ReceiverKind>)]
    receiver: Option<ReceiverKind>,
    #[arg(long, global = true, value_parser = parse_named::<TapReceiver>)]
    tap: Option<TapReceiver>,
    /// Optimizer starts per scheme.
    #[arg(long, global = true)]
    starts: Option<usize>,
    #[arg(long, global = true)]
    optimizer_seed: Option<u64>,
    /// Fixed Fock dimension.
    #[arg(long, global = true)]
    dim: Option<usize>,
    #[arg(long, global = true)]
    tail_tol: Option<f64>,
    /// Comma-separated cumulant axes (x, p).
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_named::<Axis>)]
    axes: Option<Vec<Axis>>,
    /// Disable the data-parallel row evaluation.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Args)]
struct WignerArgs {
    #[arg(long, value_enum)]
    state: Option<WignerState>,
    /// Operating point in grid units.
    #[arg(long)]
    at: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    half_width: Option<f64>,
    /// Write `W_state - W_coherent`.
    #[arg(long)]
    diff: bool,
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($flag:expr => $field:expr) => {
            if let Some(v) = $flag.clone() {
                $field = v;
            }
        };
    }
    set!(c.start => cfg.grid.start);
    set!(c.stop => cfg.grid.stop);
    set!(c.points => cfg.grid.points);
    set!(c.units => cfg.grid.units);
    set!(c.format => cfg.format);
    set!(c.seed => cfg.seed);
    set!(c.mc_shots => cfg.mc_shots);
    set!(c.receiver => cfg.receiver);
    set!(c.tap => cfg.tap);
    set!(c.optimizer_seed => cfg.optimizer.seed);
    set!(c.tail_tol => cfg.truncation.tail_tol);
    set!(c.axes => cfg.axes);
    if c.schemes.is_some() {
        cfg.schemes = c.schemes.clone();
    }
    if c.starts.is_some() {
        cfg.optimizer.starts = c.starts;
    }
    if c.dim.is_some() {
        cfg.truncation.dim = c.dim;
    }
    if c.out.is_some() {
        cfg.out = c.out.clone();
    }
    cfg.sequential |= c.sequential;
    if let Command::Wigner(w) = &cli.command {
        set!(w.state => cfg.wigner.state);
        set!(w.at => cfg.wigner.at);
        set!(w.grid_points => cfg.wigner.points);
        set!(w.half_width => cfg.wigner.half_width);
        cfg.wigner.diff |= w.diff;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// `<out>.<suffix>` next to the output file.
fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

fn render(table: &Table, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Csv => table.to_csv(),
        Format::Json => serde_json::to_string_pretty(&table.to_json())? + "\n",
    })
}

fn emit(cfg: &RunConfig, command: &str, body: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(out) => {
            std::fs::write(out, body)?;
            let sidecar = json!({ "command": command, "config": cfg });
            std::fs::write(sibling(out, "config.json"), serde_json::to_string_pretty(&sidecar)? + "\n")?;
        }
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    let (name, table) = match &cli.command {
        Command::DiscrimCurve => ("discrim-curve", commands::discrim_curve(&cfg)?),
        Command::FidelityCurve => ("fidelity-curve", commands::fidelity_curve(&cfg)?),
        Command::Params => ("params", commands::params(&cfg)?),
        Command::Cumulants => ("cumulants", commands::cumulant_table(&cfg)?),
        Command::Wigner(_) => return run_wigner(&cfg),
    };
    emit(&cfg, name, &render(&table, cfg.format)?)
}

fn run_wigner(cfg: &RunConfig) -> Result<(), CliError> {
    let out = cfg
        .out
        .as_ref()
        .ok_or_else(|| CliError::Config("wigner writes several files and needs --out".into()))?;
    let w = commands::wigner_map(cfg)?;
    let body = match cfg.format {
        Format::Csv => commands::wigner_table(&w.grid).to_csv(),
        Format::Json => serde_json::to_string_pretty(&commands::wigner_envelope(&w.grid, &w.summary))? + "\n",
    };
    emit(cfg, "wigner", &body)?;
    let ext = match cfg.format {
        Format::Csv => "marginals.csv",
        Format::Json => "marginals.json",
    };
    std::fs::write(sibling(out, ext), render(&commands::marginal_table(&w.grid), cfg.format)?)?;
    let summary: Value = w.summary;
    std::fs::write(sibling(out, "summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bcs: {e}");
            match e {
                CliError::Config(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
