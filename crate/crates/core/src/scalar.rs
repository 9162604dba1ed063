//! Numeric backend abstraction.
//!
//! Every engine in this crate is generic over one scalar type so that the
//! same code path serves both exact rational verification and fast float
//! search. The trait deliberately demands `Ord + Eq + Hash`: canonical state
//! keys and memo tables require total order and hashability, so the float
//! backend is the [`F64`] newtype (total order via `f64::total_cmp`, hash via
//! bit pattern) rather than bare `f64`.

use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + Eq
    + Ord
    + Hash
    + std::fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Zero
    + One
{
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64_lossy(&self) -> f64;

    fn complement(&self) -> Self {
        Self::one() - self.clone()
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// `f64` with the total order and bitwise hashing the memo tables need.
/// Probabilities and costs in this crate never become NaN, so the total
/// order agrees with the usual one.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct F64(pub f64);

impl Eq for F64 {}

#[allow(clippy::derive_ord_xor_partial_ord)]
impl Ord for F64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Hash for F64 {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

impl Add for F64 {
    type Output = F64;
    fn add(self, rhs: F64) -> F64 {
        F64(self.0 + rhs.0)
    }
}

impl Sub for F64 {
    type Output = F64;
    fn sub(self, rhs: F64) -> F64 {
        F64(self.0 - rhs.0)
    }
}

impl Mul for F64 {
    type Output = F64;
    fn mul(self, rhs: F64) -> F64 {
        F64(self.0 * rhs.0)
    }
}

impl Div for F64 {
    type Output = F64;
    fn div(self, rhs: F64) -> F64 {
        F64(self.0 / rhs.0)
    }
}

impl Zero for F64 {
    fn zero() -> Self {
        F64(0.0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }
}

impl One for F64 {
    fn one() -> Self {
        F64(1.0)
    }
}

impl Scalar for F64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        F64(num as f64 / den as f64)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.0
    }
}

/// Parse a rational written as "num/den" or "num".
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n.trim().parse().ok()?;
        let den: BigInt = d.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    } else {
        let num: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(num))
    }
}

/// Render a rational as "num/den" (always with an explicit denominator, so
/// the output re-parses as exact).
pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Nearest fraction with denominator at most `max_den` (by rounding the
/// scaled value; the result is reduced).
pub fn rationalize(x: f64, max_den: u64) -> BigRational {
    let den = BigInt::from(max_den);
    let num = BigInt::from((x * max_den as f64).round() as i64);
    BigRational::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("1/2").unwrap(), Scalar::from_ratio(1, 2));
        assert_eq!(parse_rational(" 7 / 16 ").unwrap(), Scalar::from_ratio(7, 16));
        assert_eq!(parse_rational("3").unwrap(), Scalar::from_ratio(3, 1));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("a/b").is_none());
    }

    #[test]
    fn rational_string_always_has_denominator() {
        let two: BigRational = Scalar::from_ratio(2, 1);
        assert_eq!(rational_string(&two), "2/1");
        assert_eq!(parse_rational("2/1").unwrap(), two);
    }

    #[test]
    fn rationalize_reduces() {
        let half = rationalize(0.5, 1_000_000);
        assert_eq!(half, Scalar::from_ratio(1, 2));
    }

    #[test]
    fn f64_total_order_and_hash_agree() {
        assert!(F64(0.25) < F64(0.5));
        assert_eq!(F64(1.0), F64(1.0));
        let s = F64::from_ratio(1, 4) + F64::from_ratio(1, 4);
        assert_eq!(s, F64(0.5));
    }
}
