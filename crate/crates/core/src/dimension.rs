//! Torus model of the hull: angle coordinates, the two metrics, covering and
//! packing counts, and box-counting dimension fits.
//!
//! Covers are greedy and only ever give upper bounds on the minimal covering
//! number; packings are greedy `2 eps`-separated subsets and give lower
//! bounds. Balls are closed. A packing point blocks everything strictly closer
//! than `2 eps`.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::almost_periods::{length_sample, WindowPolicy};
use crate::error::{Error, Limits, Result};
use crate::regression::fit_line;
use crate::signal::QuasiperiodicSignal;

const TIE: f64 = 1e-12;

fn fold(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// A point of `T^n = R^n / 2pi Z^n`, angles in `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusPoint {
    angles: Vec<f64>,
}

impl TorusPoint {
    pub fn new(angles: Vec<f64>) -> TorusPoint {
        TorusPoint {
            angles: angles.into_iter().map(fold).collect(),
        }
    }

    pub fn zeros(n: usize) -> TorusPoint {
        TorusPoint {
            angles: vec![0.0; n],
        }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// `lambda_j s mod 2pi`, reduced in extended precision.
pub fn orbit_angles(f: &QuasiperiodicSignal, s: f64) -> TorusPoint {
    TorusPoint {
        angles: f
            .terms()
            .iter()
            .map(|t| fold(TAU * t.exponent.phase_cycles(s)))
            .collect(),
    }
}

fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(TAU - d)
}

fn check_dims(x: &TorusPoint, y: &TorusPoint) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(())
}

/// Max over coordinates of the circle distance.
pub fn torus_metric(x: &TorusPoint, y: &TorusPoint) -> Result<f64> {
    check_dims(x, y)?;
    Ok(Metric::Torus.dist_unchecked(x, y))
}

/// `sum_j |A_j| |e^{i x_j} - e^{i y_j}|`.
pub fn hull_metric(f: &QuasiperiodicSignal, x: &TorusPoint, y: &TorusPoint) -> Result<f64> {
    let n = f.len();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    check_dims(x, y)?;
    Ok(Metric::hull(f).dist_unchecked(x, y))
}

/// The two metrics on the torus.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Max of circle (arc) distances.
    Torus,
    /// Weighted sum of chord lengths; weights are the amplitudes `|A_j|`.
    Hull { weights: Vec<f64> },
}

impl Metric {
    pub fn hull(f: &QuasiperiodicSignal) -> Metric {
        Metric::Hull {
            weights: f.terms().iter().map(|t| t.amplitude.norm()).collect(),
        }
    }

    pub fn distance(&self, x: &TorusPoint, y: &TorusPoint) -> Result<f64> {
        check_dims(x, y)?;
        if let Metric::Hull { weights } = self {
            if weights.len() != x.len() {
                return Err(Error::DimensionMismatch {
                    expected: weights.len(),
                    got: x.len(),
                });
            }
        }
        Ok(self.dist_unchecked(x, y))
    }

    fn dist_unchecked(&self, x: &TorusPoint, y: &TorusPoint) -> f64 {
        let (xs, ys) = (&x.angles, &y.angles);
        match self {
            Metric::Torus => xs
                .iter()
                .zip(ys)
                .map(|(&a, &b)| circle_dist(a, b))
                .fold(0.0, f64::max),
            Metric::Hull { weights } => weights
                .iter()
                .zip(xs.iter().zip(ys))
                .map(|(w, (&a, &b))| w * 2.0 * ((a - b) / 2.0).sin().abs())
                .sum(),
        }
    }

    /// Per-coordinate contribution at angular offset `d` in `[0, pi]`.
    fn coord(&self, j: usize, d: f64) -> f64 {
        match self {
            Metric::Torus => d,
            Metric::Hull { weights } => weights[j] * 2.0 * (d / 2.0).sin(),
        }
    }

    fn combine(&self, acc: f64, c: f64) -> f64 {
        match self {
            Metric::Torus => acc.max(c),
            Metric::Hull { .. } => acc + c,
        }
    }

    /// Largest angular offset in coordinate `j` that can stay within `r`.
    fn reach(&self, j: usize, r: f64) -> f64 {
        let r = r * (1.0 + TIE);
        match self {
            Metric::Torus => r.min(PI),
            Metric::Hull { weights } => {
                let s = r / (2.0 * weights[j]);
                if s >= 1.0 {
                    PI
                } else {
                    2.0 * s.asin()
                }
            }
        }
    }

    /// Upper bound on `metric / torus_metric`.
    pub fn torus_ratio_bound(&self) -> f64 {
        match self {
            Metric::Torus => 1.0,
            Metric::Hull { weights } => weights.iter().sum(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceConstants {
    /// Min and max of `hull / torus` over every sampled pair.
    pub c1: f64,
    pub c2: f64,
    /// The same restricted to the near-diagonal pairs.
    pub near_c1: f64,
    pub near_c2: f64,
    /// Near-diagonal pairs sit at torus distances `2^-1 .. 2^-finest_exp`.
    pub finest_exp: u32,
    pub pairs: usize,
    pub seed: u64,
}

/// Sampled comparison constants between the hull and torus metrics: half the
/// pairs uniform, half at torus distance exactly `2^-k`, `k` cycling through
/// `1..=finest_exp`.
pub fn equivalence_constants(
    f: &QuasiperiodicSignal,
    sample_count: usize,
    seed: u64,
    finest_exp: u32,
) -> Result<EquivalenceConstants> {
    if sample_count < 100 {
        return Err(Error::InvalidInput("need at least 100 samples".into()));
    }
    if !(1..=40).contains(&finest_exp) {
        return Err(Error::InvalidInput(
            "finest scale exponent must be in 1..=40".into(),
        ));
    }
    let n = f.len();
    let metric = Metric::hull(f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uniform =
        |rng: &mut ChaCha8Rng| TorusPoint::new((0..n).map(|_| rng.gen_range(0.0..TAU)).collect());
    let (mut c1, mut c2) = (f64::INFINITY, 0.0f64);
    let (mut near_c1, mut near_c2) = (f64::INFINITY, 0.0f64);
    let mut pairs = 0;
    for i in 0..sample_count {
        let x = uniform(&mut rng);
        let near = i % 2 == 1;
        let y = if near {
            let k = (i / 2) as u32 % finest_exp + 1;
            let scale = (-(k as f64)).exp2();
            let mut u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            // one coordinate carries the full distance
            let lead = rng.gen_range(0..n);
            u[lead] = if u[lead] < 0.0 { -1.0 } else { 1.0 };
            TorusPoint::new(
                x.angles
                    .iter()
                    .zip(&u)
                    .map(|(a, d)| a + scale * d)
                    .collect(),
            )
        } else {
            uniform(&mut rng)
        };
        let t = Metric::Torus.dist_unchecked(&x, &y);
        if t == 0.0 {
            continue;
        }
        let ratio = metric.dist_unchecked(&x, &y) / t;
        pairs += 1;
        c1 = c1.min(ratio);
        c2 = c2.max(ratio);
        if near {
            near_c1 = near_c1.min(ratio);
            near_c2 = near_c2.max(ratio);
        }
    }
    Ok(EquivalenceConstants {
        c1,
        c2,
        near_c1,
        near_c2,
        finest_exp,
        pairs,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoverCounts {
    pub cover_upper: usize,
    pub packing_lower: usize,
}

/// Buckets on the first (up to) three coordinates, cells at least as wide
/// as the per-coordinate reach of `radius`.
struct Index<'a> {
    points: &'a [TorusPoint],
    metric: &'a Metric,
    radius: f64,
    dims: usize,
    cells: Vec<usize>,
    buckets: Vec<Vec<usize>>,
}

impl<'a> Index<'a> {
    fn new(points: &'a [TorusPoint], metric: &'a Metric, radius: f64) -> Index<'a> {
        let n = points.first().map_or(0, |p| p.len());
        let dims = n.min(3);
        let per_dim_cap = ((4 * points.len()) as f64)
            .powf(1.0 / dims.max(1) as f64)
            .max(1.0);
        let cells: Vec<usize> = (0..dims)
            .map(|j| {
                let reach = metric.reach(j, radius);
                ((TAU / reach).floor().min(per_dim_cap) as usize).max(1)
            })
            .collect();
        let total: usize = cells.iter().product();
        let mut buckets = vec![Vec::new(); total];
        let mut index = Index {
            points,
            metric,
            radius,
            dims,
            cells,
            buckets: Vec::new(),
        };
        for (i, p) in points.iter().enumerate() {
            buckets[index.cell_of(p)].push(i);
        }
        index.buckets = buckets;
        index
    }

    fn cell_coord(&self, p: &TorusPoint, j: usize) -> usize {
        let c = self.cells[j];
        ((p.angles[j] / TAU * c as f64) as usize).min(c - 1)
    }

    fn cell_of(&self, p: &TorusPoint) -> usize {
        (0..self.dims).fold(0, |acc, j| acc * self.cells[j] + self.cell_coord(p, j))
    }

    /// Calls `visit` on every point within `radius` of `p`.
    fn for_neighbors(&self, p: &TorusPoint, mut visit: impl FnMut(usize)) {
        let mut ranges: Vec<Vec<usize>> = Vec::with_capacity(self.dims);
        for j in 0..self.dims {
            let c = self.cells[j];
            let home = self.cell_coord(p, j);
            let mut r: Vec<usize> = if c >= 3 {
                vec![(home + c - 1) % c, home, (home + 1) % c]
            } else {
                (0..c).collect()
            };
            r.dedup();
            ranges.push(r);
        }
        let limit = self.radius * (1.0 + TIE);
        let mut idx = vec![0usize; self.dims];
        loop {
            let cell = (0..self.dims).fold(0, |acc, j| acc * self.cells[j] + ranges[j][idx[j]]);
            for &q in &self.buckets[cell] {
                if self.metric.dist_unchecked(p, &self.points[q]) <= limit {
                    visit(q);
                }
            }
            // odometer over the neighbouring cells
            let mut j = self.dims;
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < ranges[j].len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "eps must be positive, got {eps}"
        )));
    }
    Ok(())
}

fn check_points(points: &[TorusPoint], metric: &Metric) -> Result<()> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidInput("empty point sample".into()));
    };
    let n = first.len();
    if let Metric::Hull { weights } = metric {
        if weights.len() != n {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                got: n,
            });
        }
    }
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.len(),
        });
    }
    Ok(())
}

/// Greedy cover and packing of a finite sample. `resolution` is the sample's
/// density in the metric's own units and must not exceed `eps / 4`.
///
/// The cover visits points in order; the first uncovered point `p` is
/// covered by whichever sample point within `eps` of `p` covers the most
/// still-uncovered points (earliest on ties).
pub fn covering_number(
    points: &[TorusPoint],
    metric: &Metric,
    eps: f64,
    resolution: f64,
) -> Result<CoverCounts> {
    check_eps(eps)?;
    check_points(points, metric)?;
    if resolution > eps / 4.0 {
        return Err(Error::GridTooCoarse {
            spacing: resolution,
            limit: eps / 4.0,
        });
    }

    let index = Index::new(points, metric, eps);
    let mut covered = vec![false; points.len()];
    let mut centers = 0;
    let mut cand = Vec::new();
    for p in 0..points.len() {
        if covered[p] {
            continue;
        }
        cand.clear();
        index.for_neighbors(&points[p], |q| cand.push(q));
        cand.sort_unstable();
        let mut best = (0usize, p);
        for &c in &cand {
            let mut gain = 0;
            index.for_neighbors(&points[c], |q| gain += usize::from(!covered[q]));
            if gain > best.0 {
                best = (gain, c);
            }
        }
        index.for_neighbors(&points[best.1], |q| covered[q] = true);
        centers += 1;
    }

    let index2 = Index::new(points, metric, 2.0 * eps);
    let mut blocked = vec![false; points.len()];
    let mut packed = 0;
    let strict = 2.0 * eps * (1.0 - TIE);
    for p in 0..points.len() {
        if blocked[p] {
            continue;
        }
        packed += 1;
        index2.for_neighbors(&points[p], |q| {
            if metric.dist_unchecked(&points[p], &points[q]) < strict {
                blocked[q] = true;
            }
        });
    }
    Ok(CoverCounts {
        cover_upper: centers,
        packing_lower: packed,
    })
}

/// The regular grid with `m` points per coordinate, stored as a bitmap.
struct Bitmap {
    words: Vec<u64>,
}

impl Bitmap {
    fn new(len: usize) -> Bitmap {
        Bitmap {
            words: vec![0; len.div_ceil(64)],
        }
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.words[i >> 6] |= 1 << (i & 63);
    }

    fn next_clear(&self, from: usize, len: usize) -> Option<usize> {
        let mut w = from >> 6;
        let mut bits = !self.words.get(w)? & (!0u64 << (from & 63));
        loop {
            if bits != 0 {
                let i = (w << 6) + bits.trailing_zeros() as usize;
                return (i < len).then_some(i);
            }
            w += 1;
            bits = !*self.words.get(w)?;
        }
    }
}

struct Grid {
    n: usize,
    m: usize,
    len: usize,
}

impl Grid {
    /// Offsets (per coordinate, in `(-m/2, m/2]`) within `radius`, in
    /// lexicographic order.
    fn ball(&self, metric: &Metric, radius: f64) -> Vec<Vec<i64>> {
        let m = self.m as i64;
        let lo = -((m - 1) / 2);
        let hi = m / 2;
        let tables: Vec<Vec<f64>> = (0..self.n)
            .map(|j| {
                (lo..=hi)
                    .map(|k| metric.coord(j, TAU * (k.unsigned_abs() as f64) / self.m as f64))
                    .collect()
            })
            .collect();
        let limit = radius * (1.0 + TIE);
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(self.n);
        fn rec(
            j: usize,
            acc: f64,
            cur: &mut Vec<i64>,
            out: &mut Vec<Vec<i64>>,
            tables: &[Vec<f64>],
            metric: &Metric,
            lo: i64,
            limit: f64,
        ) {
            if j == tables.len() {
                out.push(cur.clone());
                return;
            }
            for (i, &c) in tables[j].iter().enumerate() {
                let a = metric.combine(acc, c);
                if a <= limit {
                    cur.push(lo + i as i64);
                    rec(j + 1, a, cur, out, tables, metric, lo, limit);
                    cur.pop();
                }
            }
        }
        rec(0, 0.0, &mut cur, &mut out, &tables, metric, lo, limit);
        out
    }

    #[inline]
    fn shift(&self, p: usize, off: &[i64]) -> usize {
        let m = self.m as i64;
        let mut rest = p;
        let mut idx = 0usize;
        let mut place = 1usize;
        for j in (0..self.n).rev() {
            let c = (rest % self.m) as i64;
            rest /= self.m;
            let mut s = c + off[j];
            if s < 0 {
                s += m;
            } else if s >= m {
                s -= m;
            }
            idx += s as usize * place;
            place *= self.m;
        }
        idx
    }
}

/// Smallest grid size per coordinate meeting the density rule for `eps`.
pub fn grid_size_for(metric: &Metric, eps: f64) -> usize {
    let spacing = eps / (4.0 * metric.torus_ratio_bound());
    (TAU / spacing).ceil() as usize
}

/// Greedy cover and packing of the full `m^n` torus grid, in lexicographic
/// order. Centers for the first uncovered point are restricted to
/// lexicographically forward offsets.
pub fn grid_covering_number(
    metric: &Metric,
    n: usize,
    m: usize,
    eps: f64,
    limits: &Limits,
) -> Result<CoverCounts> {
    check_eps(eps)?;
    if n == 0 || m == 0 {
        return Err(Error::InvalidInput("grid needs n >= 1 and m >= 1".into()));
    }
    if let Metric::Hull { weights } = metric {
        if weights.len() != n {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                got: n,
            });
        }
    }
    let spacing = TAU / m as f64;
    let limit = eps / (4.0 * metric.torus_ratio_bound());
    if spacing > limit {
        return Err(Error::GridTooCoarse { spacing, limit });
    }
    let len = (m as u64)
        .checked_pow(n as u32)
        .filter(|&l| l <= usize::MAX as u64)
        .ok_or(Error::Budget {
            what: "torus grid",
            needed: u64::MAX,
            cap: limits.max_grid_points,
        })?;
    limits.check_grid("torus grid", len)?;
    let grid = Grid {
        n,
        m,
        len: len as usize,
    };

    let ball = grid.ball(metric, eps);
    let forward: Vec<&Vec<i64>> = ball
        .iter()
        .filter(|o| o.iter().find(|&&d| d != 0).is_none_or(|&d| d > 0))
        .collect();
    let mut covered = Bitmap::new(grid.len);
    let mut centers = 0;
    let mut from = 0;
    while let Some(p) = covered.next_clear(from, grid.len) {
        let mut best = (0usize, p);
        for off in &forward {
            let c = grid.shift(p, off);
            let gain = ball
                .iter()
                .filter(|o| !covered.get(grid.shift(c, o)))
                .count();
            if gain > best.0 {
                best = (gain, c);
            }
        }
        for o in &ball {
            covered.set(grid.shift(best.1, o));
        }
        centers += 1;
        from = p + 1;
    }

    let strict = 2.0 * eps * (1.0 - TIE);
    let block: Vec<Vec<i64>> = grid
        .ball(metric, 2.0 * eps)
        .into_iter()
        .filter(|o| {
            let d = o.iter().enumerate().fold(0.0, |acc, (j, &k)| {
                metric.combine(
                    acc,
                    metric.coord(j, TAU * k.unsigned_abs() as f64 / m as f64),
                )
            });
            d < strict
        })
        .collect();
    let mut blocked = Bitmap::new(grid.len);
    let mut packed = 0;
    let mut from = 0;
    while let Some(p) = blocked.next_clear(from, grid.len) {
        packed += 1;
        for o in &block {
            blocked.set(grid.shift(p, o));
        }
        from = p + 1;
    }
    Ok(CoverCounts {
        cover_upper: centers,
        packing_lower: packed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleCount {
    pub eps: f64,
    pub cover_upper: usize,
    pub packing_lower: usize,
    /// Grid points per coordinate.
    pub grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionFit {
    pub lower_dim: f64,
    pub upper_dim: f64,
    pub lower_rms: f64,
    pub upper_rms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringReport {
    pub metric: Metric,
    pub n: usize,
    /// Decreasing in `eps`.
    pub scales: Vec<ScaleCount>,
    pub fit: Option<DimensionFit>,
}

impl CoveringReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,cover_upper,packing_lower\n");
        for s in &self.scales {
            out.push_str(&format!(
                "{},{},{}\n",
                s.eps, s.cover_upper, s.packing_lower
            ));
        }
        out
    }
}

/// Slopes of `ln(count)` against `ln(1/eps)`: packing counts for the lower
/// dimension, cover counts for the upper.
pub fn dimension_fit(report: &CoveringReport) -> Result<DimensionFit> {
    if report.scales.len() < 4 {
        return Err(Error::TooFewScales {
            needed: 4,
            got: report.scales.len(),
        });
    }
    let pts = |count: fn(&ScaleCount) -> usize| -> Vec<(f64, f64)> {
        report
            .scales
            .iter()
            .map(|s| ((1.0 / s.eps).ln(), (count(s) as f64).ln()))
            .collect()
    };
    let lower = fit_line(&pts(|s| s.packing_lower));
    let upper = fit_line(&pts(|s| s.cover_upper));
    match (lower, upper) {
        (Some(l), Some(u)) => Ok(DimensionFit {
            lower_dim: l.slope,
            upper_dim: u.slope,
            lower_rms: l.rms,
            upper_rms: u.rms,
        }),
        _ => Err(Error::InvalidInput("scales must have distinct eps".into())),
    }
}

/// Grid covers of the whole torus at each `eps`. The grid is `grid` points
/// per coordinate if given, otherwise sized by [`grid_size_for`].
pub fn torus_dimension(
    metric: &Metric,
    n: usize,
    eps: &[f64],
    grid: Option<usize>,
    limits: &Limits,
) -> Result<CoveringReport> {
    if eps.is_empty() {
        return Err(Error::InvalidInput("empty eps list".into()));
    }
    let mut sorted = eps.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.dedup();
    let mut scales = Vec::with_capacity(sorted.len());
    for &e in &sorted {
        let m = grid.unwrap_or_else(|| grid_size_for(metric, e));
        let c = grid_covering_number(metric, n, m, e, limits)?;
        scales.push(ScaleCount {
            eps: e,
            cover_upper: c.cover_upper,
            packing_lower: c.packing_lower,
            grid: m,
        });
    }
    let mut report = CoveringReport {
        metric: metric.clone(),
        n,
        scales,
        fit: None,
    };
    report.fit = dimension_fit(&report).ok();
    Ok(report)
}

/// Orbit points `orbit_angles(f, s)` for `s` from `a` to `b` in steps of at
/// most `step`, endpoints included.
pub fn orbit_segment(
    f: &QuasiperiodicSignal,
    a: f64,
    b: f64,
    step: f64,
    limits: &Limits,
) -> Result<Vec<TorusPoint>> {
    if !(b >= a && step > 0.0) {
        return Err(Error::InvalidInput(
            "segment needs a <= b and step > 0".into(),
        ));
    }
    let k = ((b - a) / step).ceil().max(1.0);
    limits.check_grid("orbit segment", k as u64 + 1)?;
    let k = k as usize;
    let h = (b - a) / k as f64;
    Ok((0..=k).map(|i| orbit_angles(f, a + i as f64 * h)).collect())
}

/// Cover counts of the orbit segment `[-L(eps/2), L(eps/2)]` at radius `eps`,
/// sampled at hull resolution `eps/8`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentCount {
    pub eps: f64,
    /// Upper inclusion length at `eps / 2`.
    pub half_length: f64,
    pub points: usize,
    pub counts: CoverCounts,
}

pub fn segment_count(
    f: &QuasiperiodicSignal,
    eps: f64,
    policy: &WindowPolicy,
    limits: &Limits,
) -> Result<SegmentCount> {
    check_eps(eps)?;
    let l = length_sample(f, eps / 2.0, policy, limits)?.l_upper;
    let step = eps / (8.0 * f.lipschitz_constant());
    let points = orbit_segment(f, -l, l, step, limits)?;
    let counts = covering_number(&points, &Metric::hull(f), eps, eps / 8.0)?;
    Ok(SegmentCount {
        eps,
        half_length: l,
        points: points.len(),
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichReport {
    pub eps: f64,
    pub slack: f64,
    /// Segment cover at `2 eps`, `eps` and `eps / 2`.
    pub segment_2eps: SegmentCount,
    pub segment_eps: SegmentCount,
    pub segment_half: SegmentCount,
    /// Grid cover of the whole hull at `eps`.
    pub hull_eps: ScaleCount,
    /// `2 L(eps/2) / delta(eps/2) + 1`.
    pub count_bound: f64,
    pub sandwich_left: bool,
    pub sandwich_right: bool,
    pub count_bound_holds: bool,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.sandwich_left && self.sandwich_right && self.count_bound_holds
    }
}

/// Segment-versus-hull covering checks at one scale, each allowed a factor
/// of `slack`:
/// `N_seg(2 eps) <= N_hull(eps) <= N_seg(eps / 2)` and
/// `N_seg(eps) <= 2 L(eps/2) / delta(eps/2) + 1`.
pub fn sandwich_checks(
    f: &QuasiperiodicSignal,
    eps: f64,
    slack: f64,
    policy: &WindowPolicy,
    limits: &Limits,
) -> Result<SandwichReport> {
    check_eps(eps)?;
    if slack < 1.0 {
        return Err(Error::InvalidInput(
            "slack factor must be at least 1".into(),
        ));
    }
    let seg = |e: f64| -> Result<SegmentCount> {
        if e > f.diameter_bound() {
            // everything sits inside one ball
            Ok(SegmentCount {
                eps: e,
                half_length: 0.0,
                points: 1,
                counts: CoverCounts {
                    cover_upper: 1,
                    packing_lower: 1,
                },
            })
        } else {
            segment_count(f, e, policy, limits)
        }
    };
    let segment_2eps = seg(2.0 * eps)?;
    let segment_eps = seg(eps)?;
    let segment_half = seg(eps / 2.0)?;
    let metric = Metric::hull(f);
    let m = grid_size_for(&metric, eps);
    let hull = grid_covering_number(&metric, f.len(), m, eps, limits)?;
    let hull_eps = ScaleCount {
        eps,
        cover_upper: hull.cover_upper,
        packing_lower: hull.packing_lower,
        grid: m,
    };
    let count_bound = 2.0 * segment_eps.half_length / f.continuity_delta(eps / 2.0) + 1.0;
    let n_2 = segment_2eps.counts.cover_upper as f64;
    let n_1 = segment_eps.counts.cover_upper as f64;
    let n_h = segment_half.counts.cover_upper as f64;
    let hull_n = hull_eps.cover_upper as f64;
    Ok(SandwichReport {
        eps,
        slack,
        segment_2eps,
        segment_eps,
        segment_half,
        hull_eps,
        count_bound,
        sandwich_left: n_2 <= slack * hull_n,
        sandwich_right: hull_n <= slack * n_h,
        count_bound_holds: n_1 <= slack * count_bound,
    })
}
