//! JSON scenario configs, CSV traces, JSON reports and the `logsens`
//! command-line surface.
//!
//! Exit codes: 0 on success (including an inconclusive classification), 1 on
//! numerical or output failure, 2 on a config or usage error (including an
//! unreadable config file).

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use commands::{
    analyze, check_oracles, check_oracles_system, oracle_times, run_scenario, table1_csv,
    table1_repro, AnalysisReport, Chain, ClassificationReport, ConstantsReport, DeviationReport,
    EmpiricalReport, OraclePair, OracleReport, Provenance, RunOutcome, Table1Row, REPORT_FILE,
    TABLE1_BRACKET, TABLE1_UNIT_FIDELITY_STEP, TRACE_FILE,
};
pub use config::{
    default_fit_window, parse_grid, validate_config, validate_value, CNum, OutputKind, Scenario,
    ScenarioConfig, MAX_GRID_POINTS, SCHEMA_VERSION,
};
pub use output::{canonical_json, config_hash, trace_csv, write_atomic, TRACE_HEADER};

use crate::matexp::DerivMethod;
use crate::Error;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "LOGSENS_OUT_DIR";

/// A rejected config, with the path of the offending field.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}{message}", if path.is_empty() { String::new() } else { format!("{path}: ") })]
pub struct ConfigError {
    /// Dotted field path such as `parameters.b`; empty for document-level errors.
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "logsens",
    version,
    about = "Log-sensitivity of error signals in linear systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output directory (default: $LOGSENS_OUT_DIR, else the working directory).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Time grid as start:end:step, overriding the config.
    #[arg(long)]
    pub grid: Option<String>,
    /// Derivative route: analytic, quadrature, blockaug or fd.
    #[arg(long)]
    pub method: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the trace and analysis report of a scenario.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compare every derivative route at evenly spaced times.
    Check {
        config: PathBuf,
        /// Number of sample times.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Fidelity against log-sensitivity near the first transfer time.
    Table1 {
        #[arg(long, value_enum)]
        chain: Chain,
        /// Comma-separated fidelity targets (default: the published rows).
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<f64>>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Validate a config and print it with defaults filled in.
    Validate { config: PathBuf },
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn load_config(path: &Path) -> Result<ScenarioConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
    Ok(validate_config(&text)?)
}

fn apply_overrides(mut cfg: ScenarioConfig, common: &Common) -> Result<ScenarioConfig, Error> {
    if let Some(g) = &common.grid {
        cfg = cfg.with_grid(parse_grid(g)?)?;
    }
    if let Some(m) = &common.method {
        cfg.method = m
            .parse::<DerivMethod>()
            .map_err(|e| ConfigError::new("--method", e.to_string()))?;
    }
    Ok(cfg)
}

/// Exit code for an error: 2 for config errors, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 2,
        _ => 1,
    }
}

/// Executes a parsed command, printing results to stdout.
pub fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, common } => {
            let cfg = apply_overrides(load_config(&config)?, &common)?;
            let dir = out_dir(common.out_dir);
            let out = run_scenario(&cfg, &dir)?;
            let c = &out.report.classification;
            println!("kind: {}", c.kind);
            if let Some(s) = c.slope {
                println!("predicted slope: {s}");
            }
            if let Some(s) = out.report.empirical.fitted_slope {
                println!("fitted |s| slope: {s}");
            }
            if let (Some(t0), Some(p)) = (c.t0, c.period) {
                println!("spike schedule: {t0} + {p}·n");
            }
            if let Some(d) = &c.diagnostic {
                println!("diagnostic: {d}");
            }
            for p in &out.written {
                println!("wrote {}", p.display());
            }
        }
        Command::Check {
            config,
            samples,
            common,
        } => {
            let cfg = apply_overrides(load_config(&config)?, &common)?;
            let rep = check_oracles(&cfg, samples)?;
            print!(
                "{}",
                canonical_json(&serde_json::to_value(&rep).expect("report serializes"))
            );
        }
        Command::Table1 {
            chain,
            targets,
            out_dir: dir,
        } => {
            let targets = targets.unwrap_or_else(|| chain.default_targets());
            let rows = table1_repro(chain, &targets)?;
            let csv = table1_csv(&rows);
            let path = out_dir(dir).join(format!("table1_{}.csv", chain.name()));
            write_atomic(&path, csv.as_bytes())?;
            print!("{csv}");
            println!("wrote {}", path.display());
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            print!("{}", canonical_json(&cfg.to_value()));
        }
    }
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
