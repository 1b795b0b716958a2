//! Continued fractions, badly-approximable scores, simultaneous denominators
//! and an inhomogeneous (Kronecker) solver.
//!
//! Continued fractions run in exact big-integer arithmetic. A floating input
//! is treated as the interval `x +- |x| 2^-bits`: a partial quotient is only
//! emitted when both ends of the interval agree on it, so every quotient
//! returned is certified for any real inside the interval.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Limits, Result};
use crate::real::{parse_decimal, Real, WORKING_BITS};
use crate::signal::{parse_real_expr, Exponent};

/// What to expand.
#[derive(Debug, Clone, PartialEq)]
pub enum CfSource {
    /// Exact rational; the expansion terminates.
    Exact(BigRational),
    /// A real known to relative accuracy `2^-bits`.
    Approx { value: Real, bits: u32 },
}

impl CfSource {
    /// A double-double constant, trusted to a few bits short of full width.
    pub fn real(value: Real) -> CfSource {
        CfSource::Approx {
            value,
            bits: WORKING_BITS - 6,
        }
    }

    /// `p/q` and plain decimals are exact; anything else goes through
    /// [`parse_real_expr`] and is trusted to `bits`.
    pub fn parse(text: &str, bits: u32) -> Option<CfSource> {
        let text = text.trim();
        if let Some((p, q)) = text.split_once('/') {
            let p = parse_decimal(p.trim()).ok()?;
            let q = parse_decimal(q.trim()).ok()?;
            return (!q.is_zero()).then(|| CfSource::Exact(p / q));
        }
        if let Ok(r) = parse_decimal(text) {
            return Some(CfSource::Exact(r));
        }
        parse_real_expr(text).map(|value| CfSource::Approx { value, bits })
    }

    pub fn to_real(&self) -> Real {
        match self {
            CfSource::Exact(r) => Real::from_rational(r),
            CfSource::Approx { value, .. } => *value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuedFraction {
    #[serde(serialize_with = "ser_big")]
    pub a0: BigInt,
    /// Partial quotients `a_1, a_2, ...`, all positive.
    #[serde(serialize_with = "ser_big_vec")]
    pub quotients: Vec<BigInt>,
    /// `(p_k, q_k)` for `k = 0..=quotients.len()`.
    #[serde(serialize_with = "ser_pairs")]
    pub convergents: Vec<(BigInt, BigInt)>,
    /// True when the input was rational and the expansion ended.
    pub terminated: bool,
}

fn ser_big<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_big_vec<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

fn ser_pairs<S: serde::Serializer>(
    v: &[(BigInt, BigInt)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|(p, q)| [p.to_string(), q.to_string()]))
}

impl ContinuedFraction {
    fn from_terms(a0: BigInt, quotients: Vec<BigInt>, terminated: bool) -> ContinuedFraction {
        let mut convergents = Vec::with_capacity(quotients.len() + 1);
        // p_{-1} = 1, q_{-1} = 0
        let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
        let (mut p, mut q) = (a0.clone(), BigInt::one());
        convergents.push((p.clone(), q.clone()));
        for a in &quotients {
            let p_next = a * &p + &p_prev;
            let q_next = a * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
            convergents.push((p.clone(), q.clone()));
        }
        ContinuedFraction {
            a0,
            quotients,
            convergents,
            terminated,
        }
    }

    /// Exact value of the last convergent.
    pub fn value(&self) -> BigRational {
        let (p, q) = self
            .convergents
            .last()
            .expect("k = 0 convergent always present");
        BigRational::new(p.clone(), q.clone())
    }

    pub fn quotients_u64(&self) -> Option<Vec<u64>> {
        self.quotients
            .iter()
            .map(|a| u64::try_from(a).ok())
            .collect()
    }
}

fn floor_rat(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Exact expansion of a rational, at most `depth` quotients after `a0`.
fn expand_exact(x: &BigRational, depth: usize) -> ContinuedFraction {
    let a0 = floor_rat(x);
    let mut rest = x - BigRational::from_integer(a0.clone());
    let mut quotients = Vec::new();
    while !rest.is_zero() && quotients.len() < depth {
        let inv = rest.recip();
        let a = floor_rat(&inv);
        rest = inv - BigRational::from_integer(a.clone());
        quotients.push(a);
    }
    let terminated = rest.is_zero();
    ContinuedFraction::from_terms(a0, quotients, terminated)
}

/// Quotients certified for every real in `[lo, hi]`; stops at `depth` or
/// when the ends disagree.
fn expand_interval(
    mut lo: BigRational,
    mut hi: BigRational,
    depth: usize,
) -> (BigInt, Vec<BigInt>, bool) {
    let a0 = floor_rat(&lo);
    if floor_rat(&hi) != a0 {
        return (a0, Vec::new(), false);
    }
    let mut quotients = Vec::new();
    let mut a = a0.clone();
    while quotients.len() < depth {
        let a_rat = BigRational::from_integer(a.clone());
        let lo_frac = &lo - &a_rat;
        let hi_frac = &hi - &a_rat;
        if lo_frac.is_zero() {
            return (a0, quotients, false);
        }
        // reciprocal reverses the order
        let new_lo = hi_frac.recip();
        let new_hi = lo_frac.recip();
        lo = new_lo;
        hi = new_hi;
        a = floor_rat(&lo);
        if floor_rat(&hi) != a {
            return (a0, quotients, false);
        }
        quotients.push(a.clone());
    }
    (a0, quotients, true)
}

fn approx_bounds(value: Real, bits: u32) -> (BigRational, BigRational) {
    let x = value.to_rational();
    let scale = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
    let mag = if x.is_zero() {
        scale.clone()
    } else {
        x.abs() * &scale
    };
    (&x - &mag, &x + &mag)
}

/// Expands `a0 + 1/(a_1 + 1/(a_2 + ...))` to `depth` quotients after `a0`.
pub fn cf_expand(x: &CfSource, depth: usize) -> Result<ContinuedFraction> {
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    match x {
        CfSource::Exact(r) => Ok(expand_exact(r, depth)),
        CfSource::Approx { value, bits } => {
            if !value.is_finite() {
                return Err(Error::InvalidInput(
                    "cannot expand a non-finite value".into(),
                ));
            }
            let (lo, hi) = approx_bounds(*value, *bits);
            let (a0, quotients, complete) = expand_interval(lo, hi, depth);
            if !complete {
                return Err(Error::PrecisionExhausted {
                    certified: quotients.len(),
                });
            }
            Ok(ContinuedFraction::from_terms(a0, quotients, false))
        }
    }
}

/// As many certified quotients as the precision allows, up to `depth`.
pub fn cf_expand_certified(value: Real, bits: u32, depth: usize) -> ContinuedFraction {
    let (lo, hi) = approx_bounds(value, bits);
    let (a0, quotients, _) = expand_interval(lo, hi, depth);
    ContinuedFraction::from_terms(a0, quotients, false)
}

/// Convergents `(p_0, q_0), ..., (p_k, q_k)`.
pub fn convergents(cf: &ContinuedFraction, k: usize) -> Result<Vec<(BigInt, BigInt)>> {
    if k >= cf.convergents.len() {
        return Err(Error::OutOfRange {
            index: k,
            len: cf.convergents.len(),
        });
    }
    Ok(cf.convergents[..=k].to_vec())
}

/// Empirical constant of the badly-approximable inequality over `q <= Q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BadnessReport {
    pub n: usize,
    pub q_max: u64,
    /// `min_{q <= Q} q^{1/n} max_j ||q alpha_j||`.
    pub score: f64,
    pub argmin_q: u64,
}

#[inline]
fn max_dist(alpha: &[Real], q: u64) -> f64 {
    alpha
        .iter()
        .map(|a| a.mul_f64(q as f64).dist_to_int())
        .fold(0.0, f64::max)
}

const MAX_EXACT_Q: u64 = 1 << 53;

pub fn badness_score(alpha: &[Real], q_max: u64, limits: &Limits) -> Result<BadnessReport> {
    if alpha.is_empty() || q_max == 0 {
        return Err(Error::InvalidInput(
            "need a non-empty tuple and Q >= 1".into(),
        ));
    }
    limits.check_q("badness scan", q_max)?;
    if q_max > MAX_EXACT_Q {
        return Err(Error::InvalidInput("Q above 2^53".into()));
    }
    let inv_n = 1.0 / alpha.len() as f64;
    let mut best = (f64::INFINITY, 0u64);
    for q in 1..=q_max {
        let s = (q as f64).powf(inv_n) * max_dist(alpha, q);
        if s < best.0 {
            best = (s, q);
        }
        if s == 0.0 {
            break;
        }
    }
    Ok(BadnessReport {
        n: alpha.len(),
        q_max,
        score: best.0,
        argmin_q: best.1,
    })
}

/// Smallest `q <= q_max` with `max_j ||q alpha_j|| <= delta`.
pub fn best_simultaneous_denominator(
    alpha: &[Real],
    delta: f64,
    q_max: u64,
    limits: &Limits,
) -> Result<Option<u64>> {
    if alpha.is_empty() {
        return Err(Error::InvalidInput("empty tuple".into()));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidInput(format!(
            "delta must lie in (0, 1/2), got {delta}"
        )));
    }
    if q_max == 0 {
        return Err(Error::InvalidInput("Q must be at least 1".into()));
    }
    limits.check_q("simultaneous denominator scan", q_max)?;
    Ok((1..=q_max.min(MAX_EXACT_Q)).find(|&q| max_dist(alpha, q) <= delta))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KroneckerSolution {
    pub t: f64,
    pub residuals: Vec<f64>,
}

/// `|lambda_j t - kappa_j|` reduced mod 2pi and folded to `[0, pi]`.
pub fn kronecker_residuals(lambda: &[Exponent], kappa: &[f64], t: f64) -> Vec<f64> {
    lambda
        .iter()
        .zip(kappa)
        .map(|(l, &k)| {
            let target = Real::from(k) / Real::TWO_PI;
            let turns = (l.cycles().mul_f64(t) - target).dist_to_int();
            std::f64::consts::TAU * turns
        })
        .collect()
}

/// First `t` on the grid `0, h, 2h, ...` (`h = eps / (2 max|lambda|)`) up to
/// `t_max` with every residual below `eps`. `None` when the range is too
/// short.
pub fn kronecker_solve(
    lambda: &[Exponent],
    kappa: &[f64],
    eps: f64,
    t_max: f64,
    limits: &Limits,
) -> Result<Option<KroneckerSolution>> {
    if lambda.is_empty() || lambda.len() != kappa.len() {
        return Err(Error::DimensionMismatch {
            expected: lambda.len(),
            got: kappa.len(),
        });
    }
    if !(eps > 0.0 && t_max > 0.0) {
        return Err(Error::InvalidInput("eps and Tmax must be positive".into()));
    }
    let speed = lambda.iter().map(|l| l.radians().abs()).fold(0.0, f64::max);
    let step = eps / (2.0 * speed);
    let last = (t_max / step).floor();
    limits.check_grid("kronecker grid", last as u64 + 1)?;
    let last = last as u64;
    let mut k = 0u64;
    while k <= last {
        let t = k as f64 * step;
        let residuals = kronecker_residuals(lambda, kappa, t);
        let worst = residuals.iter().copied().fold(0.0, f64::max);
        if worst < eps {
            return Ok(Some(KroneckerSolution { t, residuals }));
        }
        // the worst residual moves at most `speed` per unit time, so no grid
        // point closer than (worst - eps) / speed can succeed
        let skip = ((worst - eps) / speed / step).floor() as u64;
        k += skip.max(1);
    }
    Ok(None)
}
