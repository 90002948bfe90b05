//! Scalar fields used throughout the crate.
//!
//! Every finite-model computation is generic over [`Scalar`]. Two
//! implementations are provided: [`Rational`] (exact, arbitrary precision)
//! and `f64` (tolerance-based). Comparisons take an explicit tolerance that
//! exact scalars ignore.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True for exact arithmetic.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn ratio(num: i64, den: i64) -> Self;
    /// Exact for rationals (dyadic expansion of the float).
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;

    /// Parses `"3/5"`, `"0.6"`, `"1"`. Decimal strings become exact rationals
    /// in exact mode.
    fn parse(text: &str) -> Option<Self>;

    /// JSON value: rational strings for exact scalars, numbers for floats.
    fn to_json(&self) -> serde_json::Value;

    /// Hashable key for exact scalars; `None` for floats.
    fn exact_key(&self) -> Option<String>;

    fn abs(&self) -> Self {
        if self.sign(0.0) == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn is_zero_tol(&self, tol: f64) -> bool {
        self.sign(tol) == Ordering::Equal
    }

    /// Sign of the value, treating `|v| <= tol` as zero for inexact scalars.
    fn sign(&self, tol: f64) -> Ordering;

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.clone() - other.clone()).is_zero_tol(tol)
    }

    fn is_positive(&self, tol: f64) -> bool {
        self.sign(tol) == Ordering::Greater
    }

    fn is_negative(&self, tol: f64) -> bool {
        self.sign(tol) == Ordering::Less
    }

    fn from_usize(v: usize) -> Self {
        Self::from_i64(v as i64)
    }

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(Zero::zero)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            return Some(BigRational::new(n, d));
        }
        parse_decimal(text)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }

    fn exact_key(&self) -> Option<String> {
        Some(self.to_string())
    }

    fn sign(&self, _tol: f64) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if num_traits::Signed::is_positive(self) {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

fn parse_decimal(text: &str) -> Option<Rational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let negative = mantissa.starts_with('-');
    let body = mantissa.trim_start_matches(['-', '+']);
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(if negative { -value } else { value })
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            let n: f64 = n.trim().parse().ok()?;
            let d: f64 = d.trim().parse().ok()?;
            if d == 0.0 {
                return None;
            }
            return Some(n / d);
        }
        text.parse().ok()
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }

    fn exact_key(&self) -> Option<String> {
        None
    }

    fn sign(&self, tol: f64) -> Ordering {
        if f64::abs(*self) <= tol {
            Ordering::Equal
        } else if *self > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

/// Default comparison tolerance for a scalar type.
pub fn default_tolerance<F: Scalar>() -> f64 {
    if F::EXACT {
        0.0
    } else {
        1e-9
    }
}

pub fn vec_approx_eq<F: Scalar>(a: &[F], b: &[F], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.approx_eq(y, tol))
}

pub fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .fold(F::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn vec_add<F: Scalar>(a: &[F], b: &[F]) -> Vec<F> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn vec_sub<F: Scalar>(a: &[F], b: &[F]) -> Vec<F> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn vec_scale<F: Scalar>(a: &[F], s: &F) -> Vec<F> {
    a.iter().map(|x| x.clone() * s.clone()).collect()
}

pub fn vec_to_json<F: Scalar>(v: &[F]) -> serde_json::Value {
    serde_json::Value::Array(v.iter().map(Scalar::to_json).collect())
}

/// Scales a nonzero vector so that its first nonzero entry has absolute
/// value one. Used to compare rays up to positive scaling.
pub fn normalize_ray<F: Scalar>(v: &[F], tol: f64) -> Option<Vec<F>> {
    let pivot = v.iter().find(|x| !x.is_zero_tol(tol))?;
    let scale = pivot.abs();
    if F::EXACT {
        Some(v.iter().map(|x| x.clone() / scale.clone()).collect())
    } else {
        // Max-abs scaling is better conditioned for floats.
        let max = v
            .iter()
            .map(|x| x.to_f64().abs())
            .fold(0.0_f64, f64::max);
        let s = F::from_f64(max);
        Some(v.iter().map(|x| x.clone() / s.clone()).collect())
    }
}

/// Best rational approximation with bounded denominator (continued fractions).
pub fn rational_approximation(x: f64, max_den: i64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut value = x;
    for _ in 0..64 {
        let a = value.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = value - a as f64;
        if frac.abs() < 1e-12 {
            break;
        }
        value = 1.0 / frac;
    }
    if k1 == 0 {
        None
    } else {
        Some((h1, k1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_and_decimal_strings() {
        assert_eq!(Rational::parse("3/5"), Some(Rational::ratio(3, 5)));
        assert_eq!(Rational::parse("0.6"), Some(Rational::ratio(3, 5)));
        assert_eq!(Rational::parse("-1.25"), Some(Rational::ratio(-5, 4)));
        assert_eq!(Rational::parse("2e-1"), Some(Rational::ratio(1, 5)));
        assert_eq!(Rational::parse("1/0"), None);
        assert_eq!(Rational::parse("abc"), None);
        assert_eq!(f64::parse("3/4"), Some(0.75));
    }

    #[test]
    fn float_sign_respects_tolerance() {
        assert_eq!(1e-12_f64.sign(1e-9), Ordering::Equal);
        assert_eq!((-1e-6_f64).sign(1e-9), Ordering::Less);
        assert_eq!(Rational::ratio(-1, 10_000_000).sign(1.0), Ordering::Less);
    }

    #[test]
    fn continued_fraction_recovers_small_rationals() {
        assert_eq!(rational_approximation(1.0 / 3.0, 1000), Some((1, 3)));
        assert_eq!(rational_approximation(-0.75, 1000), Some((-3, 4)));
    }
}
