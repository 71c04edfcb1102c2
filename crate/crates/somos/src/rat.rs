//! Exact rational arithmetic.
//!
//! `Rat` is an arbitrary-precision rational kept in lowest terms with a
//! positive denominator; `num-rational` already maintains exactly that
//! canonical form, so the type is a thin alias plus the handful of
//! helpers the rest of the crate needs (parsing, integer powers, square
//! detection).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, reduced, denominator > 0, zero is 0/1.
pub type Rat = num_rational::BigRational;

/// Shorthand for small rational constants, mostly in tests.
pub fn rat(numer: i64, denom: i64) -> Rat {
    assert!(denom != 0, "zero denominator");
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses "p/q" or "p". The denominator must be nonzero; sign and gcd
/// normalization happen on construction.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let numer: BigInt = n.trim().parse().map_err(|_| bad())?;
    let denom: BigInt = d.trim().parse().map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(Rat::new(numer, denom))
}

/// Exact integer power with negative exponents; `0^-n` is an error.
pub fn rat_pow(x: &Rat, exp: i64) -> Result<Rat> {
    if exp >= 0 {
        return Ok(pow_unsigned(x, exp as u64));
    }
    if x.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(pow_unsigned(&x.recip(), exp.unsigned_abs()))
}

fn pow_unsigned(x: &Rat, mut exp: u64) -> Rat {
    let mut base = x.clone();
    let mut acc = Rat::one();
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= &base;
        }
        exp >>= 1;
        if exp > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Returns the exact nonnegative square root when `x` is the square of a
/// rational, `None` otherwise.
pub fn exact_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let sn = x.numer().sqrt();
    let sd = x.denom().sqrt();
    if &(&sn * &sn) == x.numer() && &(&sd * &sd) == x.denom() {
        Some(Rat::new(sn, sd))
    } else {
        None
    }
}

/// gcd of two integers, nonnegative.
pub fn int_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

/// The integer value of `x` if its denominator is one.
pub fn as_integer(x: &Rat) -> Option<BigInt> {
    if x.denom().is_one() {
        Some(x.numer().clone())
    } else {
        None
    }
}
