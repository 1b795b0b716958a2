//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use aplab_core::almost_periods::{fit_exponent, geometric_eps, length_curve, WindowPolicy};
use aplab_core::dimension::{
    equivalence_constants, hull_metric, orbit_angles, sandwich_checks, torus_dimension, Metric,
    TorusPoint,
};
use aplab_core::diophantine::{
    badness_score, best_simultaneous_denominator, cf_expand, kronecker_residuals, kronecker_solve,
    CfSource,
};
use aplab_core::{Exponent, Limits, Preset, Real};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(elapsed: Duration, secs: u64) -> bool {
    elapsed <= Duration::from_secs(secs)
}

fn oracle_vs_closed_form() -> Outcome {
    let start = Instant::now();
    let f = Preset::Golden.signal();
    let lim = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = Vec::new();
    for _ in 0..20 {
        let tau: f64 = rng.gen_range(0.0..100.0);
        let d = f.translation_distance(tau);
        let sup = f.sup_oracle(tau, 1e4, 1e-2, &lim).unwrap();
        if !(sup >= 0.98 * d - 1e-3 && sup <= d) {
            bad.push(format!("tau={tau}: sup={sup} D={d}"));
        }
    }
    let t = start.elapsed();
    Outcome {
        pass: bad.is_empty() && within(t, 30),
        detail: format!("{} of 20 outside the band, {:.1?}", bad.len(), t),
    }
}

fn metric_identity_and_equivalence() -> Outcome {
    let f = Preset::Golden.signal();
    let zero = TorusPoint::zeros(2);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let tau: f64 = rng.gen_range(-1e4..1e4);
        let h = hull_metric(&f, &orbit_angles(&f, tau), &zero).unwrap();
        worst = worst.max((h - f.translation_distance(tau)).abs());
    }
    let consts: Vec<_> = [5, 10, 15, 20]
        .into_iter()
        .map(|k| equivalence_constants(&f, 100_000, 3, k).unwrap())
        .collect();
    let base = consts[0];
    let ordered = consts.iter().all(|c| c.c1 > 0.0 && c.c1 <= c.c2);
    let stable = consts.iter().all(|c| {
        (c.c1 / base.c1 - 1.0).abs() <= 0.2 && (c.near_c1 / base.near_c1 - 1.0).abs() <= 0.2
    });
    let last = consts[consts.len() - 1];
    Outcome {
        pass: worst < 1e-12 && ordered && stable,
        detail: format!(
            "max identity error {worst:.2e}; C1 {:.4} -> {:.4}, near-diagonal C1 {:.4} -> {:.4}, C2 {:.4}",
            base.c1, last.c1, base.near_c1, last.near_c1, last.c2
        ),
    }
}

fn hull_dimension() -> Outcome {
    let start = Instant::now();
    let lim = Limits::default();
    let eps: Vec<f64> = (2..=7).map(|k| (-(k as f64)).exp2()).collect();
    let u = Preset::Unit.signal();
    let g = Preset::Golden.signal();
    let one = torus_dimension(&Metric::hull(&u), 1, &eps, None, &lim)
        .unwrap()
        .fit
        .unwrap();
    let two = torus_dimension(&Metric::hull(&g), 2, &eps, None, &lim)
        .unwrap()
        .fit
        .unwrap();
    let t = start.elapsed();
    let ok1 = (one.lower_dim - 1.0).abs() <= 0.1 && (one.upper_dim - 1.0).abs() <= 0.1;
    let ok2 = (two.lower_dim - 2.0).abs() <= 0.2 && (two.upper_dim - 2.0).abs() <= 0.2;
    Outcome {
        pass: ok1 && ok2 && within(t, 300),
        detail: format!(
            "T1 lower {:.3} upper {:.3}; T2 lower {:.3} upper {:.3}; {:.1?}",
            one.lower_dim, one.upper_dim, two.lower_dim, two.upper_dim, t
        ),
    }
}

fn covering_sandwich() -> Outcome {
    let g = Preset::Golden.signal();
    let mut pass = true;
    let mut detail = Vec::new();
    for eps in [0.4, 0.2] {
        let r =
            sandwich_checks(&g, eps, 2.0, &WindowPolicy::default(), &Limits::default()).unwrap();
        pass &= r.passed();
        detail.push(format!(
            "eps {eps}: seg(2e)={} hull(e)={} seg(e/2)={} seg(e)={} bound={:.0}",
            r.segment_2eps.counts.cover_upper,
            r.hull_eps.cover_upper,
            r.segment_half.counts.cover_upper,
            r.segment_eps.counts.cover_upper,
            r.count_bound
        ));
    }
    Outcome {
        pass,
        detail: detail.join("; "),
    }
}

fn golden_exponent() -> Outcome {
    let start = Instant::now();
    let g = Preset::Golden.signal();
    let eps = geometric_eps(0.4, 8, 2.0);
    let curve = length_curve(&g, &eps, &WindowPolicy::default(), &Limits::default()).unwrap();
    let fit = fit_exponent(&curve).unwrap();
    let at = curve
        .samples
        .iter()
        .find(|s| (s.eps - 0.1).abs() < 1e-12)
        .unwrap();
    let t = start.elapsed();
    let slope_ok = (0.85..=1.15).contains(&fit.slope);
    let length_ok = (50.0..=60.0).contains(&at.l_upper) && (50.0..=60.0).contains(&at.l_lower);
    Outcome {
        pass: slope_ok && length_ok && within(t, 300),
        detail: format!(
            "slope {:.4} ({}); L(0.1) in [{:.2}, {:.2}], required [50, 60] ({}); {:.1?}",
            fit.slope,
            if slope_ok { "ok" } else { "out of range" },
            at.l_lower,
            at.l_upper,
            if length_ok { "ok" } else { "out of range" },
            t
        ),
    }
}

fn three_frequency_exponent() -> Outcome {
    let f = Preset::Sqrt23.signal();
    let eps = geometric_eps(0.8, 9, 2f64.sqrt());
    let curve = length_curve(&f, &eps, &WindowPolicy::default(), &Limits::default()).unwrap();
    let fit = fit_exponent(&curve).unwrap();
    Outcome {
        pass: fit.slope >= 1.7 && fit.samples_used == 9,
        detail: format!(
            "slope {:.4} over eps {}..{} ({} samples)",
            fit.slope, fit.eps_max, fit.eps_min, fit.samples_used
        ),
    }
}

fn diophantine_suite() -> Outcome {
    let start = Instant::now();
    let lim = Limits::default();
    let phi = Real::golden();
    let sqrt2 = Real::sqrt_int(2);
    let mut fails = Vec::new();

    let cf = cf_expand(&CfSource::real(phi), 30).unwrap();
    if !(cf.quotients.len() == 30 && cf.quotients.iter().all(|a| *a == 1.into())) {
        fails.push("phi quotients");
    }
    let cf = cf_expand(&CfSource::real(sqrt2), 30).unwrap();
    if !(cf.a0 == 1.into() && cf.quotients.iter().all(|a| *a == 2.into())) {
        fails.push("sqrt2 quotients");
    }
    let b = badness_score(&[phi], 100_000, &lim).unwrap();
    if !((b.score - 0.38197).abs() <= 1e-4 && b.argmin_q == 1) {
        fails.push("phi badness");
    }
    for k in 0..=5 {
        let q = 10u64.pow(k);
        if badness_score(&[phi], q, &lim).unwrap().score < 0.38 {
            fails.push("phi badness prefix");
        }
    }
    let b2 = badness_score(&[sqrt2], 100_000, &lim).unwrap();
    if !((b2.score - 0.3431).abs() <= 1e-3 && b2.argmin_q == 2) {
        fails.push("sqrt2 badness");
    }
    let q = best_simultaneous_denominator(&[phi], 0.01, 1000, &lim).unwrap();
    if q != Some(55) {
        fails.push("phi denominator");
    }
    let t = start.elapsed();
    Outcome {
        pass: fails.is_empty() && within(t, 10),
        detail: format!(
            "phi badness {:.6} at q={}, sqrt2 {:.6} at q={}, denominator {:?}, failed {:?}, {:.1?}",
            b.score, b.argmin_q, b2.score, b2.argmin_q, q, fails, t
        ),
    }
}

fn kronecker() -> Outcome {
    let start = Instant::now();
    let lambda = [
        Exponent::from_cycles(Real::ONE),
        Exponent::from_cycles(Real::golden()),
    ];
    let kappa = [0.0, PI];
    let sol = kronecker_solve(&lambda, &kappa, 0.3, 100.0, &Limits::default()).unwrap();
    let at17 = kronecker_residuals(&lambda, &kappa, 17.0);
    let t = start.elapsed();
    let found = sol.as_ref().is_some_and(|s| {
        kronecker_residuals(&lambda, &kappa, s.t)
            .iter()
            .all(|&r| r < 0.3)
    });
    Outcome {
        pass: found && at17.iter().all(|&r| r < 0.3) && within(t, 1),
        detail: format!(
            "t = {:?}, residuals at 17 = {:?}, {:.1?}",
            sol.map(|s| s.t),
            at17,
            t
        ),
    }
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_aplab"))
            .args(["verify", "--suite", "golden", "--seed", "7"])
            .output()
            .expect("run aplab")
    };
    let a = run();
    let b = run();
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    Outcome {
        pass: same && a.status.success() && b.status.success(),
        detail: format!(
            "{} bytes, identical: {same}, exit codes {:?} {:?}",
            a.stdout.len(),
            a.status.code(),
            b.status.code()
        ),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("closed-form distance vs sampled sup", oracle_vs_closed_form),
        (
            "hull metric identity and strong equivalence",
            metric_identity_and_equivalence,
        ),
        ("hull dimension of T1 and T2", hull_dimension),
        (
            "segment/hull covering sandwich and count bound",
            covering_sandwich,
        ),
        (
            "golden inclusion-length exponent and L(0.1)",
            golden_exponent,
        ),
        (
            "three-frequency exponent lower bound",
            three_frequency_exponent,
        ),
        ("Diophantine suite", diophantine_suite),
        ("Kronecker solver", kronecker),
        ("verify report determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let out = check();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {tag}: {name}: {}", i + 1, out.detail);
        failed += usize::from(!out.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
