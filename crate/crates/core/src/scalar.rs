//! Field abstraction shared by the exact (rational) and float code paths.
//!
//! Built-in algebras use [`Rational`] end to end so that wall tests such as
//! `alpha(X) = 0` never depend on rounding. User-supplied float bases run the
//! same algorithms over `f64`, where "zero" means below [`FLOAT_ZERO_TOL`]
//! relative to the magnitude of the data.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Relative zero threshold for float elimination.
pub const FLOAT_ZERO_TOL: f64 = 1e-10;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// True when arithmetic is exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact value, if this scalar carries one.
    fn to_rational(&self) -> Option<Rational>;

    /// Zero test used by elimination. `scale` is the magnitude of the data
    /// the value came from; exact scalars ignore it.
    fn is_negligible(&self, scale: f64) -> bool;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(q: &Rational) -> Self {
        Scalar::to_f64(q)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Option<Rational> {
        None
    }

    fn is_negligible(&self, scale: f64) -> bool {
        f64::abs(*self) <= FLOAT_ZERO_TOL * scale.max(1.0)
    }
}

/// Shorthand for a rational `num/den`.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer rational.
pub fn qi(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parse `"p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        BigInt::from_str(t.trim()).map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(parse_int(n)?, d))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

/// Format as `"p"` or `"p/q"` in lowest terms.
pub fn format_rational(v: &Rational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn format_vec(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

/// Exact values as `"p/q"`, floats in shortest round-trip form.
pub fn scalar_string<S: Scalar>(v: &S) -> String {
    match v.to_rational() {
        Some(r) => format_rational(&r),
        None => format!("{}", v.to_f64()),
    }
}

pub fn scalar_strings<S: Scalar>(v: &[S]) -> Vec<String> {
    v.iter().map(scalar_string).collect()
}

pub fn parse_vec(v: &[String]) -> Result<Vec<Rational>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

pub fn to_f64_vec<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

/// Largest magnitude in a slice, used as elimination scale.
pub fn max_magnitude<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn axpy<S: Scalar>(alpha: &S, x: &[S], y: &mut [S]) {
    if alpha.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi = yi.clone() + alpha.clone() * xi.clone();
        }
    }
}

pub fn scale_vec<S: Scalar>(alpha: &S, x: &[S]) -> Vec<S> {
    x.iter().map(|v| alpha.clone() * v.clone()).collect()
}

pub fn is_zero_vec<S: Scalar>(v: &[S], scale: f64) -> bool {
    v.iter().all(|x| x.is_negligible(scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings() {
        assert_eq!(parse_rational("-3/6").unwrap(), q(-1, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), qi(7));
        assert_eq!(format_rational(&q(4, -6)), "-2/3");
        assert_eq!(format_rational(&qi(5)), "5");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn float_negligible_is_relative() {
        assert!(1e-12_f64.is_negligible(1.0));
        assert!(!1e-6_f64.is_negligible(1.0));
        assert!(1e-6_f64.is_negligible(1e5));
    }
}
