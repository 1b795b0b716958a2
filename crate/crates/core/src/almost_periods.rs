//! eps-almost-period sets, inclusion lengths and the growth exponent of
//! `L(eps)`.
//!
//! A scan evaluates the translation distance `D` on a grid and turns every
//! sample into a certified statement using the Lipschitz constant `C` of `D`:
//!
//! * `D(t) < eps` puts the closed ball of radius `(eps - D(t)) / C` (less a
//!   rounding margin) inside the almost-period set;
//! * `D(t) >= eps` puts the ball of radius `(D(t) - eps) / C` outside it.
//!
//! Inner intervals are unions of the first kind of ball, outer intervals are
//! what is left of the window after removing the second kind. Because both
//! endpoints of these balls move monotonically with `t`, grid points already
//! inside a certified ball can be skipped without changing the unions, except
//! the last such point, which may extend the ball further.

use serde::Serialize;

use crate::error::{Error, Limits, Result};
use crate::regression::fit_line;
use crate::signal::QuasiperiodicSignal;

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Interval {
        Interval { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

/// Inner and outer approximations of the eps-almost-period set on a window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalSet {
    pub eps: f64,
    pub window: Interval,
    /// Sorted, disjoint; every point is an eps-almost period.
    pub inner: Vec<Interval>,
    /// Sorted, disjoint; every eps-almost period in the window lies in here.
    pub outer: Vec<Interval>,
    pub step: f64,
    /// Number of distance evaluations actually performed.
    pub evaluations: u64,
}

impl IntervalSet {
    pub fn contains_inner(&self, x: f64) -> bool {
        self.inner.iter().any(|iv| iv.contains(x))
    }

    pub fn contains_outer(&self, x: f64) -> bool {
        self.outer.iter().any(|iv| iv.contains(x))
    }

    /// Checks the structural invariants: sorted, disjoint, inside the window,
    /// inner contained in outer.
    pub fn is_well_formed(&self) -> bool {
        let ordered = |v: &[Interval]| {
            v.iter()
                .all(|iv| iv.lo <= iv.hi && self.window.contains_interval(iv))
                && v.windows(2).all(|w| w[0].hi < w[1].lo)
        };
        ordered(&self.inner)
            && ordered(&self.outer)
            && self
                .inner
                .iter()
                .all(|i| self.outer.iter().any(|o| o.contains_interval(i)))
    }
}

/// Streaming union of intervals whose endpoints arrive in non-decreasing
/// order.
#[derive(Default)]
struct Union {
    done: Vec<Interval>,
    current: Option<Interval>,
}

impl Union {
    fn push(&mut self, iv: Interval) {
        match &mut self.current {
            Some(cur) if iv.lo <= cur.hi => {
                cur.lo = cur.lo.min(iv.lo);
                cur.hi = cur.hi.max(iv.hi);
            }
            Some(cur) => {
                self.done.push(*cur);
                self.current = Some(iv);
            }
            None => self.current = Some(iv),
        }
    }

    fn finish(mut self) -> Vec<Interval> {
        self.done.extend(self.current);
        self.done
    }
}

/// Rounding margin on computed distances.
fn distance_margin(f: &QuasiperiodicSignal) -> f64 {
    64.0 * f64::EPSILON * f.diameter_bound()
}

/// Largest admissible scan step, `eps / (4C)`.
pub fn max_step(f: &QuasiperiodicSignal, eps: f64) -> f64 {
    eps / (4.0 * f.lipschitz_constant())
}

pub fn sublevel_scan(
    f: &QuasiperiodicSignal,
    eps: f64,
    window: Interval,
    step: f64,
    limits: &Limits,
) -> Result<IntervalSet> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "eps must be positive, got {eps}"
        )));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidInput(format!(
            "step must be positive, got {step}"
        )));
    }
    if !(window.lo.is_finite() && window.hi.is_finite() && window.lo < window.hi) {
        return Err(Error::InvalidInput(format!(
            "window [{}, {}] is empty",
            window.lo, window.hi
        )));
    }
    let limit = max_step(f, eps);
    if step > limit * (1.0 + 1e-12) {
        return Err(Error::StepTooCoarse { step, limit });
    }
    let span = (window.hi - window.lo) / step;
    if span >= limits.max_grid_points as f64 {
        return Err(Error::Budget {
            what: "sublevel scan grid",
            needed: span.ceil().min(u64::MAX as f64) as u64 + 1,
            cap: limits.max_grid_points,
        });
    }
    let last = span.ceil() as u64;
    limits.check_grid("sublevel scan grid", last + 1)?;

    let lip = f.lipschitz_constant();
    let margin = distance_margin(f);
    if eps > f.diameter_bound() + margin {
        // D never exceeds 2 sum |A_j|
        return Ok(IntervalSet {
            eps,
            window,
            inner: vec![window],
            outer: vec![window],
            step,
            evaluations: 0,
        });
    }
    let clip = |lo: f64, hi: f64| Interval::new(lo.max(window.lo), hi.min(window.hi));
    let grid = |k: u64| {
        if k >= last {
            window.hi
        } else {
            window.lo + k as f64 * step
        }
    };

    let mut inner = Union::default();
    let mut excluded = Union::default();
    let mut evaluations = 0u64;
    let mut k = 0u64;
    while k <= last {
        let t = grid(k);
        let d = f.translation_distance(t);
        evaluations += 1;
        let mut reach = t;
        if d < eps - margin {
            let r = (eps - margin - d) / lip;
            inner.push(clip(t - r, t + r));
            reach = t + r;
        } else if d > eps + margin {
            let e = (d - margin - eps) / lip;
            excluded.push(clip(t - e, t + e));
            reach = t + e;
        }
        let covered = ((reach - window.lo) / step).floor();
        let jump = if covered >= last as f64 {
            last
        } else {
            covered.max(0.0) as u64
        };
        k = if jump > k { jump } else { k + 1 };
    }

    let inner = inner.finish();
    let excluded = excluded.finish();
    let mut outer = Vec::new();
    let mut cursor = window.lo;
    for ex in &excluded {
        if ex.lo > cursor {
            outer.push(Interval::new(cursor, ex.lo));
        }
        cursor = cursor.max(ex.hi);
    }
    if cursor < window.hi {
        outer.push(Interval::new(cursor, window.hi));
    }

    Ok(IntervalSet {
        eps,
        window,
        inner,
        outer,
        step,
        evaluations,
    })
}

/// Largest gap left by `intervals` in `window`, counting the window edges as
/// gap endpoints. `None` when there are no intervals.
pub fn max_gap(intervals: &[Interval], window: Interval) -> Option<f64> {
    let first = intervals.first()?;
    let last = intervals.last()?;
    let mut gap = (first.lo - window.lo).max(window.hi - last.hi);
    for w in intervals.windows(2) {
        gap = gap.max(w[1].lo - w[0].hi);
    }
    Some(gap.max(0.0))
}

/// Bounds on the inclusion length of the almost-period set in the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InclusionLength {
    /// Largest gap between outer intervals. The true set is contained in the
    /// outer set, so its gaps can only be longer.
    pub lower: f64,
    /// Largest gap between inner intervals. The true set contains the inner
    /// set, so its gaps can only be shorter.
    pub upper: f64,
}

pub fn inclusion_length(s: &IntervalSet) -> Result<InclusionLength> {
    let lower = max_gap(&s.outer, s.window).ok_or(Error::EmptySet)?;
    let upper = max_gap(&s.inner, s.window).unwrap_or(s.window.width());
    Ok(InclusionLength { lower, upper })
}

/// How the scan window grows for a given eps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowPolicy {
    /// Initial window is `[0, initial_factor / eps]`.
    pub initial_factor: f64,
    /// The window doubles at most this many times.
    pub max_doublings: u32,
    /// Stop growing once the outer set has this many intervals.
    pub min_hits: usize,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        WindowPolicy {
            initial_factor: 4.0,
            max_doublings: 20,
            min_hits: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthSample {
    pub eps: f64,
    pub l_lower: f64,
    pub l_upper: f64,
    pub window: f64,
    pub hits: usize,
    pub evaluations: u64,
    pub resolved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthCurve {
    pub signal: String,
    pub samples: Vec<LengthSample>,
}

impl LengthCurve {
    pub fn resolved(&self) -> impl Iterator<Item = &LengthSample> {
        self.samples.iter().filter(|s| s.resolved)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,L_lower,L_upper,window,resolved\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.eps, s.l_lower, s.l_upper, s.window, s.resolved
            ));
        }
        out
    }
}

/// One sample of `L(eps)`, growing the window until enough almost periods
/// are seen.
pub fn length_sample(
    f: &QuasiperiodicSignal,
    eps: f64,
    policy: &WindowPolicy,
    limits: &Limits,
) -> Result<LengthSample> {
    let step = max_step(f, eps);
    let mut width = policy.initial_factor / eps;
    let mut doublings = 0;
    loop {
        let window = Interval::new(0.0, width);
        let scan = sublevel_scan(f, eps, window, step, limits)?;
        let whole = scan.inner.len() == 1 && scan.inner[0] == window;
        let hits = scan.outer.len();
        if whole || hits >= policy.min_hits || doublings >= policy.max_doublings {
            let len = inclusion_length(&scan)?;
            return Ok(LengthSample {
                eps,
                l_lower: len.lower,
                l_upper: len.upper,
                window: width,
                hits,
                evaluations: scan.evaluations,
                resolved: whole || hits >= policy.min_hits,
            });
        }
        width *= 2.0;
        doublings += 1;
    }
}

/// `L(eps)` over a strictly decreasing list of eps. A sample that runs out of
/// budget is kept and marked unresolved.
pub fn length_curve(
    f: &QuasiperiodicSignal,
    eps_list: &[f64],
    policy: &WindowPolicy,
    limits: &Limits,
) -> Result<LengthCurve> {
    if eps_list.is_empty() {
        return Err(Error::InvalidInput("empty eps list".into()));
    }
    if eps_list.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidInput("eps values must be positive".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput(
            "eps list must be strictly decreasing".into(),
        ));
    }
    let mut samples = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let sample = match length_sample(f, eps, policy, limits) {
            Ok(s) => s,
            Err(Error::Budget { .. }) | Err(Error::EmptySet) => LengthSample {
                eps,
                l_lower: f64::NAN,
                l_upper: f64::NAN,
                window: f64::NAN,
                hits: 0,
                evaluations: 0,
                resolved: false,
            },
            Err(e) => return Err(e),
        };
        samples.push(sample);
    }
    Ok(LengthCurve {
        signal: f.label().to_string(),
        samples,
    })
}

/// Finite-scale estimate of the growth exponent of `L(eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    /// Least-squares slope of `ln L` against `ln(1/eps)`.
    pub slope: f64,
    pub intercept: f64,
    /// RMS deviation from the fitted line.
    pub residual: f64,
    /// `max_k ln L(eps_k) / ln(1/eps_k)` over samples with `eps < 1`.
    pub max_ratio: f64,
    pub eps_max: f64,
    pub eps_min: f64,
    pub samples_used: usize,
}

pub fn fit_exponent(curve: &LengthCurve) -> Result<ExponentFit> {
    let used: Vec<&LengthSample> = curve
        .resolved()
        .filter(|s| s.l_upper > 0.0 && s.l_upper.is_finite())
        .collect();
    if used.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: used.len(),
        });
    }
    let pts: Vec<(f64, f64)> = used
        .iter()
        .map(|s| ((1.0 / s.eps).ln(), s.l_upper.ln()))
        .collect();
    let line = fit_line(&pts).ok_or(Error::TooFewSamples {
        needed: 3,
        got: used.len(),
    })?;
    let max_ratio = pts
        .iter()
        .filter(|p| p.0 > 0.0)
        .map(|p| p.1 / p.0)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ExponentFit {
        slope: line.slope,
        intercept: line.intercept,
        residual: line.rms,
        max_ratio,
        eps_max: used.iter().map(|s| s.eps).fold(f64::MIN, f64::max),
        eps_min: used.iter().map(|s| s.eps).fold(f64::MAX, f64::min),
        samples_used: used.len(),
    })
}

/// Geometric eps grid `start, start/factor, ...` with `count` entries.
pub fn geometric_eps(start: f64, count: usize, factor: f64) -> Vec<f64> {
    (0..count).map(|k| start / factor.powi(k as i32)).collect()
}
