//! Exact rational arithmetic.
//!
//! All costs, capacities and PLF breakpoints are exact rationals backed by
//! arbitrary-precision integers, so comparisons never suffer from rounding.

use alloc::string::String;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational number, always kept in lowest terms.
pub type Rational = num_rational::BigRational;

/// Builds `p / q`. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Builds the integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Converts a count into a rational.
pub fn from_usize(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Largest integer `<= r`.
pub fn floor_i64(r: &Rational) -> i64 {
    let f = r.floor().to_integer();
    i64::try_from(f).expect("rational floor fits in i64")
}

/// Returns `Some(n)` if `r` is a non-negative integer that fits in `usize`.
pub fn as_usize(r: &Rational) -> Option<usize> {
    if !r.is_integer() || r.is_negative() {
        return None;
    }
    usize::try_from(r.to_integer()).ok()
}

/// Formats `r` as `p/q`, including `q == 1`.
pub fn format_pq(r: &Rational) -> String {
    alloc::format!("{}/{}", r.numer(), r.denom())
}

/// Error returned by [`parse_pq`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational `{0}`: expected `p/q` or an integer")]
pub struct ParseRationalError(pub String);

/// Parses `p/q` or a plain integer `p`. Decimal notation is rejected so
/// that every value in an instance file is exact.
pub fn parse_pq(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(String::from(s));
    let t = s.trim();
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let p = BigInt::from_str(p).map_err(|_| err())?;
    let q = BigInt::from_str(q).map_err(|_| err())?;
    if q.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(p, q))
}

/// Fractional part `r - floor(r)`.
pub fn frac(r: &Rational) -> Rational {
    r - r.floor()
}

/// `1/2`.
pub fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}
