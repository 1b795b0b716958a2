//! Quasiperiodic trigonometric polynomials `f(t) = sum_j A_j exp(i lambda_j t)`.
//!
//! Exponents are stored in cycles (`lambda / 2pi`) as double-double reals, so
//! the phase `lambda_j t mod 2pi` is reduced exactly before any `f64`
//! trigonometry happens. The translation distance
//! `D(tau) = sum_j 2|A_j| |sin(lambda_j tau / 2)|` is the sup-norm distance
//! between `f` and its `tau`-translate whenever the exponents are rationally
//! independent, and an upper bound on it otherwise.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Limits, Result};
use crate::real::{parse_decimal, Real};

/// A frequency, held as cycles per unit time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent {
    cycles: Real,
}

impl Exponent {
    pub fn from_cycles(cycles: Real) -> Exponent {
        Exponent { cycles }
    }

    pub fn from_radians(radians: Real) -> Exponent {
        Exponent {
            cycles: radians / Real::TWO_PI,
        }
    }

    pub fn cycles(&self) -> Real {
        self.cycles
    }

    /// Angular frequency in radians per unit time.
    pub fn radians(&self) -> f64 {
        (self.cycles * Real::TWO_PI).to_f64()
    }

    /// `lambda t / 2pi mod 1`, in `[0, 1)`.
    #[inline]
    pub fn phase_cycles(&self, t: f64) -> f64 {
        self.cycles.mul_f64(t).fract().to_f64()
    }

    /// `|lambda t mod 2pi|` folded to `[0, pi]`, returned as a fraction of a
    /// full turn in `[0, 1/2]`.
    #[inline]
    pub fn folded_turns(&self, t: f64) -> f64 {
        self.cycles.mul_f64(t).dist_to_int()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub amplitude: Complex64,
    pub exponent: Exponent,
}

impl Term {
    pub fn new(amplitude: Complex64, exponent: Exponent) -> Term {
        Term {
            amplitude,
            exponent,
        }
    }
}

/// Named signals with exponents built from constants at full working
/// precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// `exp(i 2pi t)`.
    Unit,
    /// Exponents `2pi` and `2pi phi`.
    Golden,
    /// `exp(i 2pi t) + exp(i 2pi phi t)`.
    Golden1,
    /// Exponents `2pi`, `2pi sqrt 2`, `2pi sqrt 3`.
    Sqrt23,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Unit,
        Preset::Golden,
        Preset::Golden1,
        Preset::Sqrt23,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Unit => "unit",
            Preset::Golden => "golden",
            Preset::Golden1 => "golden1",
            Preset::Sqrt23 => "sqrt23",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn frequencies(self) -> Vec<Real> {
        match self {
            Preset::Unit => vec![Real::ONE],
            Preset::Golden | Preset::Golden1 => vec![Real::ONE, Real::golden()],
            Preset::Sqrt23 => vec![Real::ONE, Real::sqrt_int(2), Real::sqrt_int(3)],
        }
    }

    pub fn signal(self) -> QuasiperiodicSignal {
        let terms = self
            .frequencies()
            .into_iter()
            .map(|c| Term::new(Complex64::new(1.0, 0.0), Exponent::from_cycles(c)))
            .collect();
        QuasiperiodicSignal::new(terms, true)
            .expect("preset invariants")
            .with_label(self.name())
    }
}

/// `f(t) = sum_j A_j exp(i lambda_j t)` with nonzero amplitudes and distinct
/// nonzero exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiperiodicSignal {
    terms: Vec<Term>,
    independence_claimed: bool,
    label: String,
}

impl QuasiperiodicSignal {
    pub fn new(terms: Vec<Term>, independence_claimed: bool) -> Result<QuasiperiodicSignal> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("signal needs at least one term".into()));
        }
        for (j, term) in terms.iter().enumerate() {
            let a = term.amplitude;
            if !(a.re.is_finite() && a.im.is_finite()) || a.norm() == 0.0 {
                return Err(Error::InvalidInput(format!("term {j}: zero amplitude")));
            }
            let c = term.exponent.cycles();
            if !c.is_finite() || c.is_zero() {
                return Err(Error::InvalidInput(format!("term {j}: zero exponent")));
            }
            if terms[..j].iter().any(|t| t.exponent.cycles() == c) {
                return Err(Error::InvalidInput(format!("term {j}: repeated exponent")));
            }
        }
        let label = terms
            .iter()
            .map(|t| {
                format!(
                    "{}{:+}i@{}",
                    t.amplitude.re,
                    t.amplitude.im,
                    t.exponent.radians()
                )
            })
            .collect::<Vec<_>>()
            .join(",");
        Ok(QuasiperiodicSignal {
            terms,
            independence_claimed,
            label,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> QuasiperiodicSignal {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn independence_claimed(&self) -> bool {
        self.independence_claimed
    }

    pub fn amplitude_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.amplitude.norm()).sum()
    }

    /// Largest possible translation distance, `2 sum |A_j|`.
    pub fn diameter_bound(&self) -> f64 {
        2.0 * self.amplitude_sum()
    }

    pub fn evaluate(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|term| term.amplitude * cis_turns(term.exponent.phase_cycles(t)))
            .sum()
    }

    /// `D(tau) = sum_j 2|A_j| |sin(lambda_j tau / 2)|`, summed in term order.
    pub fn translation_distance(&self, tau: f64) -> f64 {
        // D is even; evaluating at |tau| makes D(-tau) == D(tau) bit for bit
        let tau = tau.abs();
        let mut acc = 0.0;
        for term in &self.terms {
            let turns = term.exponent.folded_turns(tau);
            acc += 2.0 * term.amplitude.norm() * (PI * turns).sin();
        }
        acc
    }

    /// `C = sum_j |A_j| |lambda_j|`, a Lipschitz constant for both `f` and `D`.
    /// The uniform-continuity modulus is `delta(eps) = eps / C`.
    pub fn lipschitz_constant(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.amplitude.norm() * t.exponent.radians().abs())
            .sum()
    }

    pub fn continuity_delta(&self, eps: f64) -> f64 {
        eps / self.lipschitz_constant()
    }

    /// Brute-force lower bound on `sup_t |f(t + tau) - f(t)|` over the grid
    /// `t = 0, h, 2h, ...` up to `horizon`.
    pub fn sup_oracle(
        &self,
        tau: f64,
        horizon: f64,
        grid_step: f64,
        limits: &Limits,
    ) -> Result<f64> {
        if !(horizon > 0.0 && grid_step > 0.0) {
            return Err(Error::InvalidInput(
                "sup_oracle needs horizon > 0 and grid_step > 0".into(),
            ));
        }
        let count = (horizon / grid_step).floor() + 1.0;
        limits.check_grid("sup_oracle grid", count as u64)?;
        // f(t + tau) - f(t) = sum_j A_j e^{i lambda_j t} (e^{i lambda_j tau} - 1)
        let shifted: Vec<Complex64> = self
            .terms
            .iter()
            .map(|term| {
                term.amplitude
                    * (cis_turns(term.exponent.phase_cycles(tau)) - Complex64::new(1.0, 0.0))
            })
            .collect();
        let mut best = 0.0f64;
        for k in 0..count as u64 {
            let t = k as f64 * grid_step;
            let mut z = Complex64::new(0.0, 0.0);
            for (term, w) in self.terms.iter().zip(&shifted) {
                z += w * cis_turns(term.exponent.phase_cycles(t));
            }
            best = best.max(z.norm());
        }
        Ok(best)
    }

    /// Looks for a small integer relation `sum p_j nu_j ~ 0` among the
    /// frequencies. Finding one means the independence claim is doubtful;
    /// finding none proves nothing.
    pub fn integer_relation_hint(&self, max_coeff: i64, tol: f64) -> Option<Vec<i64>> {
        let n = self.terms.len();
        if !(2..=5).contains(&n) {
            return None;
        }
        let nu: Vec<Real> = self.terms.iter().map(|t| t.exponent.cycles()).collect();
        let scale = nu.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
        let mut coeffs = vec![-max_coeff; n];
        loop {
            // first nonzero coefficient positive, to skip sign duplicates
            let lead = coeffs.iter().find(|&&c| c != 0).copied().unwrap_or(0);
            if lead > 0 {
                let s = coeffs
                    .iter()
                    .zip(&nu)
                    .fold(Real::ZERO, |acc, (&c, &v)| acc + v.mul_f64(c as f64));
                if s.to_f64().abs() <= tol * scale {
                    return Some(coeffs);
                }
            }
            let mut i = 0;
            loop {
                if i == n {
                    return None;
                }
                coeffs[i] += 1;
                if coeffs[i] > max_coeff {
                    coeffs[i] = -max_coeff;
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }
}

impl fmt::Display for QuasiperiodicSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

#[inline]
fn cis_turns(turns: f64) -> Complex64 {
    let (s, c) = (TAU * turns).sin_cos();
    Complex64::new(c, s)
}

/// Parses the signal literal grammar: comma-separated terms, each either a
/// preset name or `RE(+|-)IMi@LAMBDA`. `LAMBDA` is in radians and may be a
/// `*`-separated product of decimals and the constants `pi`, `phi`, `sqrtN`,
/// with an optional numeric prefix (`2pi`).
pub fn parse_signal(text: &str) -> Result<QuasiperiodicSignal> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::Parse {
            pos: 0,
            token: String::new(),
            msg: "empty signal string".into(),
        });
    }
    if let Some(p) = Preset::from_name(trimmed) {
        return Ok(p.signal());
    }
    let mut terms = Vec::new();
    let mut offset = 0;
    for raw in text.split(',') {
        let lead = raw.len() - raw.trim_start().len();
        let token = raw.trim();
        let pos = offset + lead;
        offset += raw.len() + 1;
        if let Some(p) = Preset::from_name(token) {
            terms.extend(p.signal().terms);
            continue;
        }
        terms.push(parse_term(token, pos)?);
    }
    QuasiperiodicSignal::new(terms, true).map_err(|e| match e {
        Error::InvalidInput(msg) => Error::Parse {
            pos: 0,
            token: text.to_string(),
            msg,
        },
        other => other,
    })
}

fn parse_term(token: &str, pos: usize) -> Result<Term> {
    let perr = |msg: &str| Error::Parse {
        pos,
        token: token.to_string(),
        msg: msg.to_string(),
    };
    let (z, lambda) = token
        .split_once('@')
        .ok_or_else(|| perr("expected COMPLEX@LAMBDA or a preset name"))?;
    let amplitude = parse_complex(z).ok_or_else(|| perr("malformed complex amplitude"))?;
    if amplitude.norm() == 0.0 {
        return Err(perr("zero amplitude"));
    }
    let radians = parse_real_expr(lambda).ok_or_else(|| perr("malformed exponent"))?;
    if radians.is_zero() {
        return Err(perr("zero exponent"));
    }
    Ok(Term::new(amplitude, Exponent::from_radians(radians)))
}

fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    let body = s.strip_suffix('i')?;
    let bytes = body.as_bytes();
    // split at the last sign that is neither leading nor part of an exponent
    let split = (1..bytes.len()).rev().find(|&i| {
        (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E')
    })?;
    let re: f64 = body[..split].parse().ok()?;
    let im_text = &body[split..];
    let im: f64 = match im_text {
        "+" => 1.0,
        "-" => -1.0,
        _ => im_text.parse().ok()?,
    };
    Some(Complex64::new(re, im))
}

/// A `*`-product of decimals and the constants `pi`, `phi`, `sqrtN`, each
/// with an optional numeric prefix.
pub fn parse_real_expr(s: &str) -> Option<Real> {
    let mut acc = Real::ONE;
    for factor in s.trim().split('*') {
        acc = acc * parse_factor(factor.trim())?;
    }
    Some(acc)
}

fn parse_factor(f: &str) -> Option<Real> {
    let (sign, f) = match f.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, f),
    };
    let split = f
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .unwrap_or(f.len());
    let (num, name) = f.split_at(split);
    let coeff = if num.is_empty() {
        Real::ONE
    } else {
        Real::from_rational(&parse_decimal(num).ok()?)
    };
    let constant = match name {
        "" => Real::ONE,
        "pi" => Real::PI,
        "phi" => Real::golden(),
        _ => {
            let n: u32 = name.strip_prefix("sqrt")?.parse().ok()?;
            Real::sqrt_int(n)
        }
    };
    Some((coeff * constant).mul_f64(sign))
}

impl FromStr for QuasiperiodicSignal {
    type Err = Error;
    fn from_str(s: &str) -> Result<QuasiperiodicSignal> {
        parse_signal(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit() -> QuasiperiodicSignal {
        Preset::Unit.signal()
    }

    #[test]
    fn evaluate_examples() {
        let z = unit().evaluate(0.0);
        assert_abs_diff_eq!(z.re, 1.0);
        assert_abs_diff_eq!(z.im, 0.0);
        let z = Preset::Golden.signal().evaluate(0.0);
        assert_abs_diff_eq!(z.re, 2.0);
        let z = unit().evaluate(0.5);
        assert_abs_diff_eq!(z.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn translation_distance_examples() {
        assert_abs_diff_eq!(unit().translation_distance(0.5), 2.0, epsilon = 1e-15);
        let g = Preset::Golden.signal();
        assert_eq!(g.translation_distance(0.0), 0.0);
        // 2|sin 55pi| + 2|sin 55 pi phi| at 50 digits
        assert_abs_diff_eq!(
            g.translation_distance(55.0),
            0.051_080_629_292_787_54,
            epsilon = 1e-14
        );
    }

    #[test]
    fn lipschitz_examples() {
        assert_abs_diff_eq!(unit().lipschitz_constant(), TAU, epsilon = 1e-15);
        let phi = Real::golden().to_f64();
        assert_abs_diff_eq!(
            Preset::Golden.signal().lipschitz_constant(),
            TAU * (1.0 + phi),
            epsilon = 1e-13
        );
        let f = parse_signal("3+0i@1").unwrap();
        assert_abs_diff_eq!(f.lipschitz_constant(), 3.0, epsilon = 1e-15);
    }

    #[test]
    fn sup_oracle_examples() {
        let lim = Limits::default();
        let g = Preset::Golden.signal();
        assert_eq!(g.sup_oracle(0.0, 10.0, 0.1, &lim).unwrap(), 0.0);
        let v = unit().sup_oracle(0.5, 1.0, 1e-3, &lim).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-4);
        let v = g.sup_oracle(55.0, 1e4, 0.01, &lim).unwrap();
        assert!((0.051 * 0.99..=0.0511).contains(&v), "{v}");
    }

    #[test]
    fn sup_oracle_budget() {
        let lim = Limits {
            max_grid_points: 1000,
            ..Limits::default()
        };
        let err = unit().sup_oracle(0.1, 100.0, 0.01, &lim).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
        assert!(unit().sup_oracle(0.1, 0.0, 0.01, &lim).is_err());
    }

    #[test]
    fn oracle_gap_shrinks_with_horizon() {
        let g = Preset::Golden.signal();
        let lim = Limits::default();
        let tau = 7.3;
        let d = g.translation_distance(tau);
        let gaps: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&h| d - g.sup_oracle(tau, h, 0.01, &lim).unwrap())
            .collect();
        assert!(gaps.iter().all(|&x| x >= -1e-12));
        assert!(gaps[2] <= gaps[0]);
    }

    #[test]
    fn presets() {
        let g = parse_signal("golden").unwrap();
        assert_eq!(g.len(), 2);
        assert_abs_diff_eq!(g.terms()[0].exponent.radians(), TAU, epsilon = 1e-15);
        assert_abs_diff_eq!(
            g.terms()[1].exponent.radians(),
            TAU * Real::golden().to_f64(),
            epsilon = 1e-14
        );
        assert_eq!(parse_signal("golden1").unwrap().terms(), g.terms());
        assert_eq!(parse_signal("sqrt23").unwrap().len(), 3);
    }

    #[test]
    fn literal_terms() {
        let f = parse_signal("1+0i@6.5,2-1i@1.0").unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.terms()[0].amplitude, Complex64::new(1.0, 0.0));
        assert_eq!(f.terms()[1].amplitude, Complex64::new(2.0, -1.0));
        assert_abs_diff_eq!(f.terms()[0].exponent.radians(), 6.5, epsilon = 1e-15);
        let f = parse_signal("-1.5e-1-2.5e+0i@2pi*phi").unwrap();
        assert_eq!(f.terms()[0].amplitude, Complex64::new(-0.15, -2.5));
        let diff =
            f.terms()[0].exponent.cycles() - Preset::Golden.signal().terms()[1].exponent.cycles();
        assert!(diff.abs().to_f64() < 1e-30);
    }

    #[test]
    fn literal_errors() {
        let err = parse_signal("0+0i@1.0").unwrap_err();
        match err {
            Error::Parse { msg, .. } => assert!(msg.contains("zero amplitude")),
            e => panic!("{e:?}"),
        }
        match parse_signal("1+0i@1, nope").unwrap_err() {
            Error::Parse { pos, token, .. } => {
                assert_eq!(pos, 8);
                assert_eq!(token, "nope");
            }
            e => panic!("{e:?}"),
        }
        assert!(parse_signal("").is_err());
        assert!(parse_signal("1+0i@0").is_err());
        assert!(parse_signal("1+0i@2,1+1i@2").is_err());
    }

    #[test]
    fn relation_hint() {
        let f = parse_signal("1+0i@1,1+0i@2,1+0i@3").unwrap();
        assert!(f.integer_relation_hint(4, 1e-12).is_some());
        assert!(Preset::Sqrt23
            .signal()
            .integer_relation_hint(6, 1e-12)
            .is_none());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn distance_is_even_bounded_and_lipschitz(tau in -1e4f64..1e4, dt in -1.0f64..1.0) {
                for f in [Preset::Golden.signal(), Preset::Sqrt23.signal(),
                          parse_signal("2-1i@1.0,0.5+0.5i@3.7").unwrap()] {
                    let d = f.translation_distance(tau);
                    prop_assert_eq!(d, f.translation_distance(-tau));
                    prop_assert!(d >= 0.0 && d <= f.diameter_bound() + 1e-12);
                    let d2 = f.translation_distance(tau + dt);
                    prop_assert!((d - d2).abs() <= f.lipschitz_constant() * dt.abs() + 1e-12);
                    prop_assert!(f.evaluate(tau).norm() <= f.amplitude_sum() + 1e-12);
                }
            }

            #[test]
            fn oracle_never_exceeds_closed_form(tau in 0.0f64..100.0) {
                let f = Preset::Golden.signal();
                let v = f.sup_oracle(tau, 50.0, 0.05, &Limits::default()).unwrap();
                prop_assert!(v <= f.translation_distance(tau) + 1e-12);
            }
        }
    }
}
