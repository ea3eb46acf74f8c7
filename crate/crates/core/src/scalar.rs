//! Scalar tower: exact rationals and tolerant doubles.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

static EPS_REL: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9
static EPS_ABS: AtomicU64 = AtomicU64::new(0x3D71_9799_812D_EA11); // 1e-12

/// Float comparison tolerances shared by the whole process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

pub fn tolerance() -> Tolerance {
    Tolerance {
        rel: f64::from_bits(EPS_REL.load(Ordering::Relaxed)),
        abs: f64::from_bits(EPS_ABS.load(Ordering::Relaxed)),
    }
}

pub fn set_tolerance(t: Tolerance) {
    EPS_REL.store(t.rel.to_bits(), Ordering::Relaxed);
    EPS_ABS.store(t.abs.to_bits(), Ordering::Relaxed);
}

/// Arithmetic kernel used by every polynomial and classifier routine.
///
/// Exact implementations compare with `==`; the float implementation compares
/// with the process tolerance.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_rational(q: &BigRational) -> Self;
    fn to_f64(&self) -> f64;

    fn is_zero(&self) -> bool;
    fn approx_eq(&self, other: &Self) -> bool;
    /// Zero relative to a magnitude scale (exact types ignore the scale).
    fn is_negligible(&self, scale: f64) -> bool;
    fn abs(&self) -> Self;
    fn is_positive(&self) -> bool;
    /// Square root inside the same field, if it exists.
    fn sqrt(&self) -> Option<Self>;

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_i64(n) / Self::from_i64(d)
    }

    fn pow(&self, k: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..k {
            r = r * self.clone();
        }
        r
    }

    fn mag(&self) -> f64 {
        self.to_f64().abs()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
    fn is_negligible(&self, _scale: f64) -> bool {
        Zero::is_zero(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn sqrt(&self) -> Option<Self> {
        if Signed::is_negative(self) {
            return None;
        }
        let n = exact_isqrt(self.numer())?;
        let d = exact_isqrt(self.denom())?;
        Some(BigRational::new(n, d))
    }
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_rational(q: &BigRational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        f64::abs(*self) <= tolerance().abs
    }
    fn approx_eq(&self, other: &Self) -> bool {
        let t = tolerance();
        let scale = f64::abs(*self).max(f64::abs(*other));
        f64::abs(self - other) <= t.abs.max(t.rel * scale)
    }
    fn is_negligible(&self, scale: f64) -> bool {
        let t = tolerance();
        f64::abs(*self) <= t.abs.max(t.rel * scale)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_positive(&self) -> bool {
        *self > tolerance().abs
    }
    fn sqrt(&self) -> Option<Self> {
        if *self >= 0.0 {
            Some(f64::sqrt(*self))
        } else if Scalar::is_zero(self) {
            Some(0.0)
        } else {
            None
        }
    }
}

/// Parse "p/q", an integer, or a plain decimal string into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

/// Render an exact rational as "p/q" (or "p" for integers).
pub fn format_rational(q: &BigRational) -> String {
    if q.denom() == &BigInt::one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tolerances() {
        let t = tolerance();
        assert_eq!(t.rel, 1e-9);
        assert_eq!(t.abs, 1e-12);
    }

    #[test]
    fn exact_sqrt_only_for_squares() {
        assert_eq!(Scalar::sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(Scalar::sqrt(&rat(2, 1)), None);
        assert_eq!(Scalar::sqrt(&rat(-1, 4)), None);
    }

    #[test]
    fn float_equality_is_relative() {
        assert!(1.0e6.approx_eq(&(1.0e6 + 1e-4)));
        assert!(!1.0.approx_eq(&1.0001));
        assert!(Scalar::is_zero(&1e-13));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-0.25"), Some(rat(-1, 4)));
        assert_eq!(parse_rational("2"), Some(rat(2, 1)));
        assert_eq!(parse_rational("1.5e2"), Some(rat(150, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(format_rational(&rat(-2, 4)), "-1/2");
    }
}
