//! Command-line front end for `aplab-core`.
//!
//! Exit codes: 0 success, 1 input error, 2 budget or precision exhausted,
//! 3 a verification check failed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod verify;

pub use config::{Format, RunConfig, PRECISION_ENV};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 1,
            CliError::Budget(_) => 2,
        }
    }
}

impl From<aplab_core::Error> for CliError {
    fn from(e: aplab_core::Error) -> Self {
        match e {
            aplab_core::Error::Budget { .. } | aplab_core::Error::PrecisionExhausted { .. } => {
                CliError::Budget(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "aplab",
    version,
    about = "Almost periods, inclusion lengths and hull dimensions of quasiperiodic signals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Evaluate f(t) and the translation distance D(t) at --at.
    Eval,
    /// Certified eps-almost-period sets on [0, --window].
    Scan,
    /// Inclusion length L(eps) over an eps list.
    LengthCurve,
    /// Log-log fit of L(eps) against 1/eps.
    DiFit,
    /// Continued fraction of one --alpha.
    Cf,
    /// min over q <= --qmax of q^(1/n) max_j ||q alpha_j||.
    Badness,
    /// Smallest q with max_j ||q alpha_j|| <= --delta.
    Simdenom,
    /// First grid t with |lambda_j t - kappa_j| < eps (mod 2pi) for all j.
    Kronecker,
    /// Covering counts and dimension fit of the hull torus.
    Dimension,
    /// Bundled verification suites.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Scan => "scan",
            Command::LengthCurve => "length-curve",
            Command::DiFit => "di-fit",
            Command::Cf => "cf",
            Command::Badness => "badness",
            Command::Simdenom => "simdenom",
            Command::Kronecker => "kronecker",
            Command::Dimension => "dimension",
            Command::Verify => "verify",
        }
    }
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// Preset name or comma-separated `RE+IMi@LAMBDA` terms.
    #[arg(long, global = true)]
    signal: Option<String>,
    /// Comma list or `start:count:factor`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    eps: Option<String>,
    #[arg(long, global = true)]
    window: Option<String>,
    #[arg(long, global = true)]
    step: Option<String>,
    #[arg(long, global = true)]
    depth: Option<String>,
    #[arg(long, global = true)]
    qmax: Option<String>,
    #[arg(long, global = true)]
    delta: Option<String>,
    /// Grid points per torus coordinate.
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<String>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// `key = value` file; flags win over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    precision_bits: Option<String>,
    #[arg(long, global = true)]
    max_grid_points: Option<String>,
    #[arg(long, global = true)]
    max_q: Option<String>,
    #[arg(long, global = true)]
    max_seconds: Option<String>,
    #[arg(long, global = true)]
    initial_factor: Option<String>,
    #[arg(long, global = true)]
    max_doublings: Option<String>,
    #[arg(long, global = true)]
    min_hits: Option<String>,
    /// Comma list: decimals, `p/q`, or constants like `phi`, `sqrt2`, `pi`.
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Target phases for `kronecker`, one per term.
    #[arg(long, global = true, allow_hyphen_values = true)]
    kappa: Option<String>,
    #[arg(long, global = true)]
    tmax: Option<String>,
    /// Points for `eval`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    at: Option<String>,
    /// hull or torus.
    #[arg(long, global = true)]
    metric: Option<String>,
    #[arg(long, global = true)]
    samples: Option<String>,
    #[arg(long, global = true)]
    slack: Option<String>,
    /// golden, sqrt23, diophantine or all.
    #[arg(long, global = true)]
    suite: Option<String>,
}

impl Opts {
    fn flag_map(&self) -> BTreeMap<String, String> {
        let pairs: [(&str, &Option<String>); 26] = [
            ("signal", &self.signal),
            ("eps", &self.eps),
            ("window", &self.window),
            ("step", &self.step),
            ("depth", &self.depth),
            ("qmax", &self.qmax),
            ("delta", &self.delta),
            ("grid", &self.grid),
            ("seed", &self.seed),
            ("out", &self.out),
            ("format", &self.format),
            ("precision-bits", &self.precision_bits),
            ("max-grid-points", &self.max_grid_points),
            ("max-q", &self.max_q),
            ("max-seconds", &self.max_seconds),
            ("initial-factor", &self.initial_factor),
            ("max-doublings", &self.max_doublings),
            ("min-hits", &self.min_hits),
            ("alpha", &self.alpha),
            ("kappa", &self.kappa),
            ("tmax", &self.tmax),
            ("at", &self.at),
            ("metric", &self.metric),
            ("samples", &self.samples),
            ("slack", &self.slack),
            ("suite", &self.suite),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }
}

/// Rendered report plus whether any verification check failed.
pub struct Report {
    pub text: String,
    pub failed: bool,
}

/// Resolves the configuration and runs one command.
pub fn execute(cfg: &RunConfig) -> Result<Report, CliError> {
    let out = commands::dispatch(cfg)?;
    let text = match cfg.format {
        Format::Csv => out.csv,
        Format::Json => {
            let doc = serde_json::json!({
                "command": cfg.command,
                "config": cfg,
                "result": out.json,
            });
            let mut s =
                serde_json::to_string_pretty(&doc).map_err(|e| CliError::Input(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    Ok(Report {
        text,
        failed: out.failed,
    })
}

fn resolve(cli: &Cli, env_precision: Option<&str>) -> Result<RunConfig, CliError> {
    let file = cli
        .opts
        .config
        .as_deref()
        .map(config::read_config)
        .transpose()?;
    RunConfig::resolve(
        cli.command.name(),
        env_precision,
        file.as_ref(),
        &cli.opts.flag_map(),
    )
}

/// Full entry point; returns the process exit code.
pub fn run<I, T>(args: I, env_precision: Option<&str>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = resolve(&cli, env_precision).and_then(|cfg| {
        let report = execute(&cfg)?;
        match &cfg.out {
            Some(path) => std::fs::write(path, &report.text)?,
            None => std::io::stdout().write_all(report.text.as_bytes())?,
        }
        Ok(report.failed)
    });
    match result {
        Ok(false) => EXIT_OK,
        Ok(true) => {
            eprintln!("aplab: verification failed");
            EXIT_VERIFY
        }
        Err(e) => {
            eprintln!("aplab: {e}");
            e.exit_code()
        }
    }
}
