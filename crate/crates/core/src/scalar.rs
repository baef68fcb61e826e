//! Number abstraction shared by the floating-point path and the exact oracle.
//!
//! Every algorithm in the crate is written once over [`Scalar`], so the oracle
//! replays the very same sequence of operations in rational arithmetic.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
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
    fn zero() -> Self;
    fn one() -> Self;
    /// Exact conversion for rationals; identity for doubles.
    fn from_f64(v: f64) -> Self;
    fn from_i64(v: i64) -> Self;
    /// Correctly rounded for rationals.
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;
    fn abs(&self) -> Self;

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }
}

impl Scalar for f64 {
    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn one() -> Self {
        1.0
    }
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }
    #[inline]
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    #[inline]
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite input")
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// Parses `p/q` or an integer.
pub fn parse_fraction(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if Zero::is_zero(&q) {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// `p/q` in lowest terms, or `p` for integers.
pub fn fraction_string(v: &Rational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// 17 significant digits: enough to round-trip any double.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip_is_exact() {
        for v in [0.1, -9999.0, 1e-300, 2.0f64.powi(-40), 1.0 / 3.0] {
            let r = <Rational as Scalar>::from_f64(v);
            assert_eq!(Scalar::to_f64(&r), v);
        }
    }

    #[test]
    fn fractions_parse_and_print() {
        let r = parse_fraction("27/56").unwrap();
        assert_eq!(fraction_string(&r), "27/56");
        assert_eq!(fraction_string(&parse_fraction("4/2").unwrap()), "2");
        assert!(parse_fraction("1/0").is_none());
    }

    #[test]
    fn real_format_round_trips() {
        let v = 0.2926226872314347_f64;
        let s = fmt_real(v);
        assert_eq!(s.parse::<f64>().unwrap(), v);
    }
}
