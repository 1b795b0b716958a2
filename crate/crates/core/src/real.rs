//! Double-double reals.
//!
//! A [`Real`] is an unevaluated sum `hi + lo` of two `f64` values with
//! `|lo| <= ulp(hi) / 2`, giving about 106 bits of mantissa. This is enough to
//! resolve `q * alpha mod 1` for denominators far beyond the 10^6 range the
//! scans use, which plain `f64` cannot do once `q * alpha` approaches 2^30.
//!
//! Only the operations the laboratory needs are provided: ring arithmetic,
//! division, square roots, integer parts and exact conversion to and from
//! rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

/// Mantissa bits carried by [`Real`] arithmetic.
pub const WORKING_BITS: u32 = 106;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let c = SPLITTER * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    if cfg!(target_feature = "fma") {
        (p, a.mul_add(b, -p))
    } else {
        // Dekker's product; a software fma is far slower
        let (ah, al) = split(a);
        let (bh, bl) = split(b);
        let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
        (p, err)
    }
}

/// Double-double real number.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Real {
    hi: f64,
    lo: f64,
}

impl Real {
    pub const ZERO: Real = Real { hi: 0.0, lo: 0.0 };
    pub const ONE: Real = Real { hi: 1.0, lo: 0.0 };
    pub const PI: Real = Real {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const TWO_PI: Real = Real {
        hi: std::f64::consts::TAU,
        lo: 2.449_293_598_294_706_4e-16,
    };

    pub fn from_parts(hi: f64, lo: f64) -> Real {
        let (hi, lo) = two_sum(hi, lo);
        Real { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    pub fn abs(self) -> Real {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> Real {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Real { hi, lo }
    }

    pub fn floor(self) -> Real {
        let fh = self.hi.floor();
        if fh == self.hi {
            let (hi, lo) = quick_two_sum(fh, self.lo.floor());
            Real { hi, lo }
        } else {
            Real { hi: fh, lo: 0.0 }
        }
    }

    pub fn round(self) -> Real {
        (self + Real::from(0.5)).floor()
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(self) -> Real {
        let f = self - self.floor();
        // the subtraction is exact up to the final renormalisation; guard the
        // one rounding case that can land on 1.0
        if f.hi >= 1.0 {
            Real::ZERO
        } else {
            f
        }
    }

    /// Distance to the nearest integer, `||x||`, in `[0, 1/2]`.
    pub fn dist_to_int(self) -> f64 {
        let f = self.fract().to_f64();
        f.min(1.0 - f)
    }

    pub fn sqrt(self) -> Real {
        if self.hi <= 0.0 {
            return Real::ZERO;
        }
        let s = self.hi.sqrt();
        let (p, e) = two_prod(s, s);
        let r = (self - Real { hi: p, lo: e }).to_f64();
        Real::from_parts(s, r / (2.0 * s))
    }

    pub fn recip(self) -> Real {
        Real::ONE / self
    }

    /// Exact value of `hi + lo` as a rational.
    pub fn to_rational(self) -> BigRational {
        let hi = BigRational::from_f64(self.hi).unwrap_or_else(BigRational::zero);
        let lo = BigRational::from_f64(self.lo).unwrap_or_else(BigRational::zero);
        hi + lo
    }

    /// Nearest double-double to a rational (two roundings).
    pub fn from_rational(r: &BigRational) -> Real {
        let hi = ratio_to_f64(r);
        let rest = r - BigRational::from_f64(hi).unwrap_or_else(BigRational::zero);
        Real::from_parts(hi, ratio_to_f64(&rest))
    }

    /// sqrt(n) for a small non-negative integer at full working precision.
    pub fn sqrt_int(n: u32) -> Real {
        Real::from(f64::from(n)).sqrt()
    }

    /// The golden ratio (1 + sqrt 5) / 2.
    pub fn golden() -> Real {
        (Real::ONE + Real::sqrt_int(5)).mul_f64(0.5)
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    // scale numerator so the integer quotient carries 64+ significant bits
    let neg = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();
    let shift = 80i64 - (num.bits() as i64 - den.bits() as i64);
    let q: BigInt = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    let mant = q.to_f64().unwrap_or(f64::INFINITY);
    let v = mant * 2f64.powi(-(shift as i32));
    if neg {
        -v
    } else {
        v
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Real {
        Real { hi: x, lo: 0.0 }
    }
}

impl From<i64> for Real {
    fn from(x: i64) -> Real {
        let hi = x as f64;
        let lo = (x - hi as i64) as f64;
        Real::from_parts(hi, lo)
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, b: Real) -> Real {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Real { hi, lo }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Real {
    type Output = Real;
    fn sub(self, b: Real) -> Real {
        self + (-b)
    }
}

impl Mul for Real {
    type Output = Real;
    fn mul(self, b: Real) -> Real {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Real { hi, lo }
    }
}

impl Div for Real {
    type Output = Real;
    fn div(self, b: Real) -> Real {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Real { hi, lo } + Real::from(q3)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid decimal literal `{0}`")]
pub struct ParseRealError(pub String);

/// Parse a decimal literal (optional sign, digits, optional fraction and
/// exponent) exactly, then round once to double-double.
pub fn parse_decimal(s: &str) -> Result<BigRational, ParseRealError> {
    let err = || ParseRealError(s.to_string());
    let t = s.trim();
    let (neg, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = digits.parse().map_err(|_| err())?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut r = if scale >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

impl FromStr for Real {
    type Err = ParseRealError;
    fn from_str(s: &str) -> Result<Real, ParseRealError> {
        parse_decimal(s).map(|r| Real::from_rational(&r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn rel_err(x: Real, exact: &BigRational) -> f64 {
        let d = (x.to_rational() - exact).abs() / exact.abs();
        ratio_to_f64(&d)
    }

    #[test]
    fn pi_constant_is_double_double_accurate() {
        // 32 significant digits of pi
        let pi = parse_decimal("3.14159265358979323846264338327950288").unwrap();
        assert!(rel_err(Real::PI, &pi) < 1e-31);
        let tau = parse_decimal("6.28318530717958647692528676655900577").unwrap();
        assert!(rel_err(Real::TWO_PI, &tau) < 1e-31);
    }

    #[test]
    fn golden_satisfies_its_quadratic() {
        let g = Real::golden();
        let r = g.to_rational();
        // phi^2 - phi - 1 = 0
        let resid = &r * &r - &r - BigRational::one();
        assert!(ratio_to_f64(&resid).abs() < 1e-30);
    }

    #[test]
    fn sqrt2_squared() {
        let s = Real::sqrt_int(2).to_rational();
        let resid = &s * &s - BigRational::from_integer(2.into());
        assert!(ratio_to_f64(&resid).abs() < 1e-30);
    }

    #[test]
    fn fract_and_dist() {
        let x = Real::from(55.0) * Real::golden();
        // 55 phi = 88.99186938124...
        assert!((x.dist_to_int() - 0.008_130_618_755_783_349).abs() < 1e-15);
        assert_eq!(Real::from(-0.25).fract().to_f64(), 0.75);
        assert_eq!(Real::from(3.0).fract().to_f64(), 0.0);
    }

    #[test]
    fn large_multiples_keep_fraction_bits() {
        // ||F_40 phi|| = 1 / (phi^40) approximately, far below f64 resolution of 40 F_40
        let f40 = 102_334_155.0;
        let d = Real::golden().mul_f64(f40).dist_to_int();
        let expected = Real::golden().to_f64().powi(-40);
        assert!((d - expected).abs() / expected < 1e-6);
    }

    #[test]
    fn division_round_trip() {
        let a = Real::golden();
        let b = Real::sqrt_int(3);
        let q = a / b;
        let back = (q * b - a).abs().to_f64();
        assert!(back < 1e-30);
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(
            parse_decimal("6.28").unwrap(),
            BigRational::new(628.into(), 100.into())
        );
        assert_eq!(
            parse_decimal("-1.5e2").unwrap(),
            BigRational::from_integer((-150).into())
        );
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("").is_err());
        let x: Real = "0.1".parse().unwrap();
        assert_eq!(x.hi(), 0.1);
        assert!(x.lo() != 0.0);
    }
}
