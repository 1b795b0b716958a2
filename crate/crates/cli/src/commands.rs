use std::fmt::Write as _;
use std::time::Instant;

use aplab_core::almost_periods::{
    fit_exponent, inclusion_length, length_curve, max_step, sublevel_scan, Interval, LengthCurve,
};
use aplab_core::dimension::{equivalence_constants, torus_dimension, Metric};
use aplab_core::diophantine::{
    badness_score, best_simultaneous_denominator, cf_expand, kronecker_solve, CfSource,
};
use aplab_core::{parse_signal, Exponent, QuasiperiodicSignal, Real};
use serde_json::{json, Value};

use crate::config::{MetricChoice, RunConfig};
use crate::{verify, CliError};

pub struct Output {
    pub csv: String,
    pub json: Value,
    pub failed: bool,
}

impl Output {
    fn new(csv: String, json: Value) -> Output {
        Output {
            csv,
            json,
            failed: false,
        }
    }
}

/// Wall-clock cap checked between independent work units.
pub struct Deadline {
    start: Instant,
    cap: Option<f64>,
}

impl Deadline {
    pub fn new(cap: Option<f64>) -> Deadline {
        Deadline {
            start: Instant::now(),
            cap,
        }
    }

    pub fn check(&self, what: &str) -> Result<(), CliError> {
        match self.cap {
            Some(cap) if self.start.elapsed().as_secs_f64() > cap => Err(CliError::Budget(
                format!("time cap of {cap} s reached before {what}"),
            )),
            _ => Ok(()),
        }
    }
}

pub fn dispatch(cfg: &RunConfig) -> Result<Output, CliError> {
    match cfg.command.as_str() {
        "eval" => eval(cfg),
        "scan" => scan(cfg),
        "length-curve" => {
            let curve = curve(cfg)?;
            Ok(Output::new(curve.to_csv(), json!(curve)))
        }
        "di-fit" => di_fit(cfg),
        "cf" => cf(cfg),
        "badness" => badness(cfg),
        "simdenom" => simdenom(cfg),
        "kronecker" => kronecker(cfg),
        "dimension" => dimension(cfg),
        "verify" => verify::run(cfg),
        other => Err(CliError::Input(format!("unknown command `{other}`"))),
    }
}

fn signal(cfg: &RunConfig) -> Result<QuasiperiodicSignal, CliError> {
    let text = cfg
        .signal
        .as_deref()
        .ok_or_else(|| CliError::Input(format!("`{}` needs --signal", cfg.command)))?;
    Ok(parse_signal(text)?)
}

fn eps_list(cfg: &RunConfig) -> Result<&[f64], CliError> {
    if cfg.eps.is_empty() {
        return Err(CliError::Input(format!("`{}` needs --eps", cfg.command)));
    }
    Ok(&cfg.eps)
}

fn single_eps(cfg: &RunConfig) -> Result<f64, CliError> {
    match eps_list(cfg)? {
        [e] => Ok(*e),
        _ => Err(CliError::Input(format!(
            "`{}` takes a single --eps",
            cfg.command
        ))),
    }
}

fn eval(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = signal(cfg)?;
    if cfg.at.is_empty() {
        return Err(CliError::Input("`eval` needs --at".into()));
    }
    let mut csv = String::from("t,re,im,translation_distance\n");
    let mut rows = Vec::new();
    for &t in &cfg.at {
        let z = f.evaluate(t);
        let d = f.translation_distance(t);
        let _ = writeln!(csv, "{t},{},{},{d}", z.re, z.im);
        rows.push(json!({"t": t, "re": z.re, "im": z.im, "translation_distance": d}));
    }
    Ok(Output::new(csv, json!({ "rows": rows })))
}

fn scan(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = signal(cfg)?;
    let eps = single_eps(cfg)?;
    let width = cfg.window.unwrap_or(cfg.initial_factor / eps);
    let step = cfg.step.unwrap_or_else(|| max_step(&f, eps));
    let set = sublevel_scan(&f, eps, Interval::new(0.0, width), step, &cfg.limits())?;
    let length = inclusion_length(&set).ok();
    let mut csv = String::from("set,lo,hi\n");
    for (name, list) in [("inner", &set.inner), ("outer", &set.outer)] {
        for iv in list {
            let _ = writeln!(csv, "{name},{},{}", iv.lo, iv.hi);
        }
    }
    Ok(Output::new(
        csv,
        json!({"scan": set, "inclusion_length": length}),
    ))
}

/// Length curve one `eps` at a time so the time cap can cut in between.
pub fn curve_for(
    f: &QuasiperiodicSignal,
    eps: &[f64],
    cfg: &RunConfig,
    deadline: &Deadline,
) -> Result<LengthCurve, CliError> {
    let mut samples = Vec::with_capacity(eps.len());
    for &e in eps {
        deadline.check("the next length sample")?;
        let part = length_curve(f, &[e], &cfg.policy(), &cfg.limits())?;
        samples.extend(part.samples);
    }
    Ok(LengthCurve {
        signal: f.label().to_string(),
        samples,
    })
}

fn curve(cfg: &RunConfig) -> Result<LengthCurve, CliError> {
    let f = signal(cfg)?;
    let eps = eps_list(cfg)?;
    curve_for(&f, eps, cfg, &Deadline::new(cfg.max_seconds))
}

fn di_fit(cfg: &RunConfig) -> Result<Output, CliError> {
    let curve = curve(cfg)?;
    let fit = fit_exponent(&curve)?;
    let csv = format!(
        "slope,intercept,residual,max_ratio,eps_max,eps_min,samples_used\n{},{},{},{},{},{},{}\n",
        fit.slope,
        fit.intercept,
        fit.residual,
        fit.max_ratio,
        fit.eps_max,
        fit.eps_min,
        fit.samples_used
    );
    Ok(Output::new(csv, json!({"curve": curve, "fit": fit})))
}

fn alpha_sources(cfg: &RunConfig) -> Result<Vec<CfSource>, CliError> {
    if cfg.alpha.is_empty() {
        return Err(CliError::Input(format!("`{}` needs --alpha", cfg.command)));
    }
    cfg.alpha
        .iter()
        .map(|a| {
            CfSource::parse(a, cfg.precision_bits)
                .ok_or_else(|| CliError::Input(format!("cannot read `{a}` as a number")))
        })
        .collect()
}

fn alpha_reals(cfg: &RunConfig) -> Result<Vec<Real>, CliError> {
    Ok(alpha_sources(cfg)?.iter().map(CfSource::to_real).collect())
}

fn cf(cfg: &RunConfig) -> Result<Output, CliError> {
    let sources = alpha_sources(cfg)?;
    let [src] = &sources[..] else {
        return Err(CliError::Input("`cf` takes a single --alpha".into()));
    };
    let cf = cf_expand(src, cfg.depth)?;
    let mut csv = String::from("k,a,p,q\n");
    let terms = std::iter::once(&cf.a0).chain(&cf.quotients);
    for (k, (a, (p, q))) in terms.zip(&cf.convergents).enumerate() {
        let _ = writeln!(csv, "{k},{a},{p},{q}");
    }
    let exact = matches!(src, CfSource::Exact(_));
    Ok(Output::new(csv, json!({"exact_input": exact, "cf": cf})))
}

fn badness(cfg: &RunConfig) -> Result<Output, CliError> {
    let alpha = alpha_reals(cfg)?;
    let r = badness_score(&alpha, cfg.qmax, &cfg.limits())?;
    let csv = format!(
        "n,q_max,score,argmin_q\n{},{},{},{}\n",
        r.n, r.q_max, r.score, r.argmin_q
    );
    Ok(Output::new(csv, json!(r)))
}

fn simdenom(cfg: &RunConfig) -> Result<Output, CliError> {
    let alpha = alpha_reals(cfg)?;
    let delta = cfg
        .delta
        .ok_or_else(|| CliError::Input("`simdenom` needs --delta".into()))?;
    let q = best_simultaneous_denominator(&alpha, delta, cfg.qmax, &cfg.limits())?;
    let csv = match q {
        Some(q) => format!("found,q\ntrue,{q}\n"),
        None => "found,q\nfalse,\n".to_string(),
    };
    Ok(Output::new(csv, json!({"found": q.is_some(), "q": q})))
}

fn kronecker(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = signal(cfg)?;
    let eps = single_eps(cfg)?;
    let lambda: Vec<Exponent> = f.terms().iter().map(|t| t.exponent).collect();
    let sol = kronecker_solve(&lambda, &cfg.kappa, eps, cfg.tmax, &cfg.limits())?;
    let n = lambda.len();
    let mut csv = String::from("found,t");
    for j in 1..=n {
        let _ = write!(csv, ",residual_{j}");
    }
    csv.push('\n');
    match &sol {
        Some(s) => {
            let _ = write!(csv, "true,{}", s.t);
            for r in &s.residuals {
                let _ = write!(csv, ",{r}");
            }
        }
        None => csv.push_str(&format!("false,{}", ",".repeat(n))),
    }
    csv.push('\n');
    Ok(Output::new(
        csv,
        json!({"found": sol.is_some(), "solution": sol}),
    ))
}

fn dimension(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = signal(cfg)?;
    let eps = eps_list(cfg)?;
    let metric = match cfg.metric {
        MetricChoice::Hull => Metric::hull(&f),
        MetricChoice::Torus => Metric::Torus,
    };
    let report = torus_dimension(&metric, f.len(), eps, cfg.grid, &cfg.limits())?;
    let equivalence = equivalence_constants(&f, cfg.samples.max(100), cfg.seed, 20)?;
    Ok(Output::new(
        report.to_csv(),
        json!({"report": report, "equivalence": equivalence}),
    ))
}
