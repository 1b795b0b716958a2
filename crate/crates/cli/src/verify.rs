//! Bundled checks on the golden preset, the three-frequency preset and the
//! Diophantine routines. Everything random is drawn from the configured seed.

use std::f64::consts::PI;
use std::fmt::Write as _;

use aplab_core::almost_periods::{fit_exponent, geometric_eps};
use aplab_core::dimension::{
    equivalence_constants, hull_metric, orbit_angles, sandwich_checks, torus_dimension, Metric,
    TorusPoint,
};
use aplab_core::diophantine::{
    badness_score, best_simultaneous_denominator, cf_expand, kronecker_residuals, kronecker_solve,
    CfSource,
};
use aplab_core::{Exponent, Preset, Real};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::commands::{curve_for, Deadline, Output};
use crate::config::{RunConfig, Suite};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub bound: String,
    pub pass: bool,
}

struct Checks {
    suite: &'static str,
    list: Vec<Check>,
}

impl Checks {
    fn push(&mut self, name: impl Into<String>, value: f64, bound: impl Into<String>, pass: bool) {
        self.list.push(Check {
            suite: self.suite,
            name: name.into(),
            value,
            bound: bound.into(),
            pass,
        });
    }
}

pub fn run(cfg: &RunConfig) -> Result<Output, CliError> {
    let deadline = Deadline::new(cfg.max_seconds);
    let mut checks = Vec::new();
    let suites: &[Suite] = match cfg.suite {
        Suite::All => &[Suite::Golden, Suite::Sqrt23, Suite::Diophantine],
        Suite::Golden => &[Suite::Golden],
        Suite::Sqrt23 => &[Suite::Sqrt23],
        Suite::Diophantine => &[Suite::Diophantine],
    };
    for suite in suites {
        let list = match suite {
            Suite::Golden => golden(cfg, &deadline)?,
            Suite::Sqrt23 => sqrt23(cfg, &deadline)?,
            Suite::Diophantine => diophantine(cfg, &deadline)?,
            Suite::All => unreachable!(),
        };
        checks.extend(list);
    }
    let passed = checks.iter().all(|c| c.pass);
    let mut csv = String::from("suite,check,value,bound,pass\n");
    for c in &checks {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            c.suite, c.name, c.value, c.bound, c.pass
        );
    }
    Ok(Output {
        csv,
        json: json!({"checks": checks, "passed": passed}),
        failed: !passed,
    })
}

fn golden(cfg: &RunConfig, deadline: &Deadline) -> Result<Vec<Check>, CliError> {
    let f = Preset::Golden.signal();
    let limits = cfg.limits();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut c = Checks {
        suite: "golden",
        list: Vec::new(),
    };

    deadline.check("the oracle check")?;
    let mut ok = 0;
    for _ in 0..20 {
        let tau = rng.gen_range(0.0..100.0);
        let d = f.translation_distance(tau);
        let sup = f.sup_oracle(tau, 1e4, 1e-2, &limits)?;
        if sup >= 0.98 * d - 1e-3 && sup <= d {
            ok += 1;
        }
    }
    c.push(
        "sampled sup vs closed form",
        ok as f64,
        "20 of 20 in [0.98 D - 1e-3; D]",
        ok == 20,
    );

    let zero = TorusPoint::zeros(2);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let tau = rng.gen_range(-1e4..1e4);
        let h = hull_metric(&f, &orbit_angles(&f, tau), &zero)?;
        worst = worst.max((h - f.translation_distance(tau)).abs());
    }
    c.push("hull metric identity", worst, "< 1e-12", worst < 1e-12);

    deadline.check("the equivalence constants")?;
    let coarse = equivalence_constants(&f, cfg.samples.max(100), cfg.seed, 5)?;
    let fine = equivalence_constants(&f, cfg.samples.max(100), cfg.seed, 20)?;
    let drift = (fine.c1 / coarse.c1 - 1.0).abs();
    let ordered = [coarse, fine].iter().all(|e| e.c1 > 0.0 && e.c1 <= e.c2);
    c.push(
        "C1 drift from 2^-5 to 2^-20",
        drift,
        "<= 0.2 with 0 < C1 <= C2",
        ordered && drift <= 0.2,
    );

    deadline.check("the hull dimension")?;
    let scales: Vec<f64> = (2..=5).map(|k| (-(k as f64)).exp2()).collect();
    let report = torus_dimension(&Metric::hull(&f), 2, &scales, None, &limits)?;
    let fit = report
        .fit
        .ok_or_else(|| CliError::Input("dimension fit needs four scales".into()))?;
    for (name, v) in [
        ("hull dimension upper", fit.upper_dim),
        ("hull dimension lower", fit.lower_dim),
    ] {
        c.push(name, v, "2 +- 0.2", (v - 2.0).abs() <= 0.2);
    }

    for eps in [0.4, 0.2] {
        deadline.check("the covering sandwich")?;
        let r = sandwich_checks(&f, eps, cfg.slack, &cfg.policy(), &limits)?;
        let hull = r.hull_eps.cover_upper as f64;
        let slack = format!("<= {}", cfg.slack);
        c.push(
            format!("segment(2eps) / hull(eps) at {eps}"),
            r.segment_2eps.counts.cover_upper as f64 / hull,
            slack.clone(),
            r.sandwich_left,
        );
        c.push(
            format!("hull(eps) / segment(eps/2) at {eps}"),
            hull / r.segment_half.counts.cover_upper as f64,
            slack.clone(),
            r.sandwich_right,
        );
        c.push(
            format!("segment(eps) / count bound at {eps}"),
            r.segment_eps.counts.cover_upper as f64 / r.count_bound,
            slack,
            r.count_bound_holds,
        );
    }

    let eps = geometric_eps(0.4, 8, 2.0);
    let curve = curve_for(&f, &eps, cfg, deadline)?;
    let di = fit_exponent(&curve)?;
    c.push(
        "inclusion length exponent",
        di.slope,
        "[0.85; 1.15]",
        (0.85..=1.15).contains(&di.slope),
    );
    for (target, lo, hi) in [(0.1, 33.0, 35.0), (0.05, 54.0, 56.0)] {
        let l = curve
            .samples
            .iter()
            .find(|s| (s.eps - target).abs() < 1e-12)
            .map_or(f64::NAN, |s| s.l_upper);
        c.push(
            format!("inclusion length at {target}"),
            l,
            format!("[{lo}; {hi}]"),
            (lo..=hi).contains(&l),
        );
    }

    let lambda = [
        Exponent::from_cycles(Real::ONE),
        Exponent::from_cycles(Real::golden()),
    ];
    let kappa = [0.0, PI];
    let sol = kronecker_solve(&lambda, &kappa, 0.3, 100.0, &limits)?;
    let recheck = sol.as_ref().map_or(f64::NAN, |s| {
        max(&kronecker_residuals(&lambda, &kappa, s.t))
    });
    c.push(
        "kronecker residual recheck",
        recheck,
        "< 0.3",
        recheck < 0.3,
    );
    let at17 = max(&kronecker_residuals(&lambda, &kappa, 17.0));
    c.push("kronecker residual at t = 17", at17, "< 0.3", at17 < 0.3);
    Ok(c.list)
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

fn sqrt23(cfg: &RunConfig, deadline: &Deadline) -> Result<Vec<Check>, CliError> {
    let f = Preset::Sqrt23.signal();
    let eps = geometric_eps(0.8, 9, 2f64.sqrt());
    let curve = curve_for(&f, &eps, cfg, deadline)?;
    let di = fit_exponent(&curve)?;
    let mut c = Checks {
        suite: "sqrt23",
        list: Vec::new(),
    };
    c.push(
        "inclusion length exponent",
        di.slope,
        ">= 1.7",
        di.slope >= 1.7,
    );
    Ok(c.list)
}

fn diophantine(cfg: &RunConfig, deadline: &Deadline) -> Result<Vec<Check>, CliError> {
    deadline.check("the Diophantine checks")?;
    let limits = cfg.limits();
    let phi = Real::golden();
    let sqrt2 = Real::sqrt_int(2);
    let mut c = Checks {
        suite: "diophantine",
        list: Vec::new(),
    };

    let cf = cf_expand(&CfSource::real(phi), 30)?;
    let ones = cf.quotients.iter().filter(|a| **a == 1.into()).count();
    c.push(
        "golden ratio quotients equal to 1",
        ones as f64,
        "30",
        ones == 30 && cf.a0 == 1.into(),
    );
    let cf = cf_expand(&CfSource::real(sqrt2), 30)?;
    let twos = cf.quotients.iter().filter(|a| **a == 2.into()).count();
    c.push(
        "sqrt2 quotients equal to 2",
        twos as f64,
        "30",
        twos == 30 && cf.a0 == 1.into(),
    );

    let b = badness_score(&[phi], 100_000, &limits)?;
    c.push(
        "golden ratio badness up to 1e5",
        b.score,
        "0.38197 +- 1e-4 at q = 1",
        (b.score - 0.38197).abs() <= 1e-4 && b.argmin_q == 1,
    );
    c.push(
        "golden ratio badness floor",
        b.score,
        ">= 0.38",
        b.score >= 0.38,
    );
    let b = badness_score(&[sqrt2], 100_000, &limits)?;
    c.push(
        "sqrt2 badness up to 1e5",
        b.score,
        "0.3431 +- 1e-3 at q = 2",
        (b.score - 0.3431).abs() <= 1e-3 && b.argmin_q == 2,
    );

    let q = best_simultaneous_denominator(&[phi], 0.01, 1000, &limits)?;
    let v = q.map_or(f64::NAN, |q| q as f64);
    c.push(
        "simultaneous denominator phi at 0.01",
        v,
        "55",
        q == Some(55),
    );
    let q = best_simultaneous_denominator(&[phi, sqrt2], 0.05, 1000, &limits)?;
    let v = q.map_or(f64::NAN, |q| q as f64);
    c.push(
        "simultaneous denominator (phi, sqrt2) at 0.05",
        v,
        "157",
        q == Some(157),
    );
    Ok(c.list)
}
