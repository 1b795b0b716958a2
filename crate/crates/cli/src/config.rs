//! Resolved run configuration: defaults, then the environment, then a
//! `key = value` file, then command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use aplab_core::almost_periods::{geometric_eps, WindowPolicy};
use aplab_core::{parse_real_expr, Limits};
use serde::Serialize;

use crate::CliError;

pub const PRECISION_ENV: &str = "APLAB_PRECISION_BITS";
pub const DEFAULT_PRECISION_BITS: u32 = 100;
const PRECISION_RANGE: std::ops::RangeInclusive<u32> = 53..=106;

/// Every key accepted in a config file; flags use the same names.
pub const KEYS: &[&str] = &[
    "signal",
    "eps",
    "window",
    "step",
    "depth",
    "qmax",
    "delta",
    "grid",
    "seed",
    "out",
    "format",
    "precision-bits",
    "max-grid-points",
    "max-q",
    "max-seconds",
    "initial-factor",
    "max-doublings",
    "min-hits",
    "alpha",
    "kappa",
    "tmax",
    "at",
    "metric",
    "samples",
    "slack",
    "suite",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricChoice {
    Hull,
    Torus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Golden,
    Sqrt23,
    Diophantine,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub signal: Option<String>,
    /// Strictly decreasing.
    pub eps: Vec<f64>,
    pub window: Option<f64>,
    pub step: Option<f64>,
    pub depth: usize,
    pub qmax: u64,
    pub delta: Option<f64>,
    pub grid: Option<usize>,
    pub seed: u64,
    pub out: Option<String>,
    pub format: Format,
    pub precision_bits: u32,
    pub max_grid_points: u64,
    pub max_q: u64,
    pub max_seconds: Option<f64>,
    pub initial_factor: f64,
    pub max_doublings: u32,
    pub min_hits: usize,
    pub alpha: Vec<String>,
    pub kappa: Vec<f64>,
    pub tmax: f64,
    pub at: Vec<f64>,
    pub metric: MetricChoice,
    pub samples: usize,
    pub slack: f64,
    pub suite: Suite,
}

impl RunConfig {
    fn defaults(command: &str, precision_bits: u32) -> RunConfig {
        let policy = WindowPolicy::default();
        let limits = Limits::default();
        RunConfig {
            command: command.to_string(),
            signal: None,
            eps: Vec::new(),
            window: None,
            step: None,
            depth: 30,
            qmax: 100_000,
            delta: None,
            grid: None,
            seed: 0,
            out: None,
            format: if command == "verify" {
                Format::Json
            } else {
                Format::Csv
            },
            precision_bits,
            max_grid_points: limits.max_grid_points,
            max_q: limits.max_q,
            max_seconds: None,
            initial_factor: policy.initial_factor,
            max_doublings: policy.max_doublings,
            min_hits: policy.min_hits,
            alpha: Vec::new(),
            kappa: Vec::new(),
            tmax: 1000.0,
            at: Vec::new(),
            metric: MetricChoice::Hull,
            samples: 10_000,
            slack: 2.0,
            suite: Suite::All,
        }
    }

    /// Applies sources lowest priority first. `env_precision` is the raw
    /// value of [`PRECISION_ENV`], if set.
    pub fn resolve(
        command: &str,
        env_precision: Option<&str>,
        file: Option<&BTreeMap<String, String>>,
        flags: &BTreeMap<String, String>,
    ) -> Result<RunConfig, CliError> {
        let bits = match env_precision {
            Some(v) => {
                parse_precision(v).map_err(|e| CliError::Input(format!("{PRECISION_ENV}: {e}")))?
            }
            None => DEFAULT_PRECISION_BITS,
        };
        let mut cfg = RunConfig::defaults(command, bits);
        for source in file.into_iter().chain(std::iter::once(flags)) {
            for (key, value) in source {
                cfg.set(key, value)
                    .map_err(|e| CliError::Input(format!("{key}: {e}")))?;
            }
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        let v = v.trim();
        match key {
            "signal" => self.signal = Some(v.to_string()),
            "eps" => self.eps = parse_eps(v)?,
            "window" => self.window = Some(positive(v)?),
            "step" => self.step = Some(positive(v)?),
            "depth" => self.depth = positive_int(v)? as usize,
            "qmax" => self.qmax = positive_int(v)?,
            "delta" => self.delta = Some(positive(v)?),
            "grid" => self.grid = Some(positive_int(v)? as usize),
            "seed" => {
                self.seed = v
                    .parse()
                    .map_err(|_| format!("`{v}` is not an unsigned integer"))?
            }
            "out" => self.out = Some(v.to_string()),
            "format" => {
                self.format = match v {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return Err(format!("`{v}` is not csv or json")),
                }
            }
            "precision-bits" => self.precision_bits = parse_precision(v)?,
            "max-grid-points" => self.max_grid_points = positive_int(v)?,
            "max-q" => self.max_q = positive_int(v)?,
            "max-seconds" => self.max_seconds = Some(positive(v)?),
            "initial-factor" => self.initial_factor = positive(v)?,
            "max-doublings" => self.max_doublings = positive_int(v)? as u32,
            "min-hits" => self.min_hits = positive_int(v)? as usize,
            "alpha" => self.alpha = split_list(v).map(str::to_string).collect(),
            "kappa" => self.kappa = split_list(v).map(number).collect::<Result<_, _>>()?,
            "tmax" => self.tmax = positive(v)?,
            "at" => self.at = split_list(v).map(number).collect::<Result<_, _>>()?,
            "metric" => {
                self.metric = match v {
                    "hull" => MetricChoice::Hull,
                    "torus" => MetricChoice::Torus,
                    _ => return Err(format!("`{v}` is not hull or torus")),
                }
            }
            "samples" => self.samples = positive_int(v)? as usize,
            "slack" => {
                self.slack = positive(v)?;
                if self.slack < 1.0 {
                    return Err("slack must be at least 1".into());
                }
            }
            "suite" => {
                self.suite = match v {
                    "golden" => Suite::Golden,
                    "sqrt23" => Suite::Sqrt23,
                    "diophantine" => Suite::Diophantine,
                    "all" => Suite::All,
                    _ => return Err(format!("unknown suite `{v}`")),
                }
            }
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    pub fn limits(&self) -> Limits {
        Limits {
            max_grid_points: self.max_grid_points,
            max_q: self.max_q,
        }
    }

    pub fn policy(&self) -> WindowPolicy {
        WindowPolicy {
            initial_factor: self.initial_factor,
            max_doublings: self.max_doublings,
            min_hits: self.min_hits,
        }
    }
}

fn parse_precision(v: &str) -> Result<u32, String> {
    let bits: u32 = v
        .trim()
        .parse()
        .map_err(|_| format!("`{v}` is not an integer"))?;
    if !PRECISION_RANGE.contains(&bits) {
        return Err(format!(
            "precision {bits} outside {}..={}",
            PRECISION_RANGE.start(),
            PRECISION_RANGE.end()
        ));
    }
    Ok(bits)
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// A float, or a constant expression such as `2pi` or `sqrt2`.
pub fn number(v: &str) -> Result<f64, String> {
    let v = v.trim();
    if let Ok(x) = v.parse::<f64>() {
        if x.is_finite() {
            return Ok(x);
        }
    }
    parse_real_expr(v)
        .map(|r| r.to_f64())
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("`{v}` is not a number"))
}

fn positive(v: &str) -> Result<f64, String> {
    let x = number(v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("`{v}` must be positive"))
    }
}

fn positive_int(v: &str) -> Result<u64, String> {
    let x: u64 = match v.parse() {
        Ok(x) => x,
        // allow 1e6 style
        Err(_) => {
            let f = number(v)?;
            if f.fract() != 0.0 || f < 0.0 || f > u64::MAX as f64 {
                return Err(format!("`{v}` is not a positive integer"));
            }
            f as u64
        }
    };
    if x == 0 {
        return Err(format!("`{v}` must be positive"));
    }
    Ok(x)
}

/// `start:count:factor` or a comma list; sorted decreasing, duplicates
/// dropped.
pub fn parse_eps(v: &str) -> Result<Vec<f64>, String> {
    let mut list = if v.contains(':') {
        let parts: Vec<&str> = v.split(':').map(str::trim).collect();
        let [start, count, factor] = parts[..] else {
            return Err("range form is start:count:factor".into());
        };
        let start = positive(start)?;
        let count = positive_int(count)? as usize;
        let factor = positive(factor)?;
        if factor <= 1.0 {
            return Err("range factor must exceed 1".into());
        }
        geometric_eps(start, count, factor)
    } else {
        split_list(v).map(positive).collect::<Result<Vec<_>, _>>()?
    };
    if list.is_empty() {
        return Err("empty list".into());
    }
    list.sort_by(|a, b| b.total_cmp(a));
    list.dedup();
    Ok(list)
}

/// Reads `key = value` lines. `#` starts a comment; keys may use `_` for `-`.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Input(format!(
                "config line {}: expected key = value",
                no + 1
            )));
        };
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Input(format!(
                "config line {}: unknown key `{}`",
                no + 1,
                k.trim()
            )));
        }
        if out.insert(key, v.trim().to_string()).is_some() {
            return Err(CliError::Input(format!(
                "config line {}: duplicate key `{}`",
                no + 1,
                k.trim()
            )));
        }
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}
