//! Elements of a quadratic extension of the rationals.
//!
//! A `QuadScalar` is `a + b*sqrt(d)`. The discriminant is part of the
//! value, canonicalized so that purely rational scalars always carry
//! `b = 0, d = 0` and scalars with `b != 0` always have a `d` that is not
//! the square of a rational. Arithmetic between two genuinely irrational
//! scalars requires the same `d`; rational scalars combine with anything.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::{exact_sqrt, parse_rat, Rat};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadScalar {
    a: Rat,
    b: Rat,
    d: Rat,
}

impl QuadScalar {
    /// Builds `a + b*sqrt(d)` in canonical form: if `d` is a rational
    /// square `r^2` the value collapses to the rational `a + b*r` (with
    /// `r >= 0`), and any scalar with `b = 0` drops its discriminant.
    pub fn new(a: Rat, b: Rat, d: Rat) -> Self {
        if b.is_zero() {
            return Self::from_rat(a);
        }
        if let Some(r) = exact_sqrt(&d) {
            return Self::from_rat(a + b * r);
        }
        QuadScalar { a, b, d }
    }

    pub fn from_rat(a: Rat) -> Self {
        QuadScalar {
            a,
            b: Rat::zero(),
            d: Rat::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(Rat::from_integer(n.into()))
    }

    /// The formal generator `sqrt(d)`; collapses to the positive rational
    /// root when `d` is a square.
    pub fn root(d: Rat) -> Self {
        Self::new(Rat::zero(), Rat::one(), d)
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn d(&self) -> &Rat {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.b.is_zero() && self.a.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Rational-part extraction; fails when the sqrt part is nonzero.
    pub fn to_rat(&self) -> Result<Rat> {
        if self.b.is_zero() {
            Ok(self.a.clone())
        } else {
            Err(Error::NotRational)
        }
    }

    /// The common discriminant of two operands, or an error when both are
    /// irrational over different extensions.
    fn join_d(&self, rhs: &Self) -> Result<Rat> {
        if self.b.is_zero() {
            Ok(rhs.d.clone())
        } else if rhs.b.is_zero() || self.d == rhs.d {
            Ok(self.d.clone())
        } else {
            Err(Error::MismatchedDiscriminant(Box::new((
                self.d.clone(),
                rhs.d.clone(),
            ))))
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        let d = self.join_d(rhs)?;
        Ok(Self::new(&self.a + &rhs.a, &self.b + &rhs.b, d))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        let d = self.join_d(rhs)?;
        Ok(Self::new(&self.a - &rhs.a, &self.b - &rhs.b, d))
    }

    /// `(a + b√d)(a' + b'√d) = (aa' + bb'd) + (ab' + a'b)√d`.
    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let d = self.join_d(rhs)?;
        let a = &self.a * &rhs.a + &self.b * &rhs.b * &d;
        let b = &self.a * &rhs.b + &rhs.a * &self.b;
        Ok(Self::new(a, b, d))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        self.checked_mul(&rhs.inv()?)
    }

    /// Inverse via the conjugate: `(a - b√d) / (a² - b²d)`.
    pub fn inv(&self) -> Result<Self> {
        let norm = &self.a * &self.a - &self.b * &self.b * &self.d;
        if norm.is_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(Self::new(&self.a / &norm, -&self.b / &norm, self.d.clone()))
    }

    /// Exact integer power; a negative exponent inverts first.
    pub fn pow(&self, exp: i64) -> Result<Self> {
        let mut base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }
}

impl From<Rat> for QuadScalar {
    fn from(a: Rat) -> Self {
        Self::from_rat(a)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for QuadScalar {
            type Output = QuadScalar;
            fn $method(self, rhs: QuadScalar) -> QuadScalar {
                self.$checked(&rhs).expect("mismatched discriminants")
            }
        }
        impl<'a> $trait<&'a QuadScalar> for &'a QuadScalar {
            type Output = QuadScalar;
            fn $method(self, rhs: &'a QuadScalar) -> QuadScalar {
                self.$checked(rhs).expect("mismatched discriminants")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Div for QuadScalar {
    type Output = QuadScalar;
    fn div(self, rhs: QuadScalar) -> QuadScalar {
        self.checked_div(&rhs)
            .expect("division by a non-invertible scalar")
    }
}

impl<'a> Div<&'a QuadScalar> for &'a QuadScalar {
    type Output = QuadScalar;
    fn div(self, rhs: &'a QuadScalar) -> QuadScalar {
        self.checked_div(rhs)
            .expect("division by a non-invertible scalar")
    }
}

impl Neg for QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        QuadScalar {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl Neg for &QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        -self.clone()
    }
}

impl fmt::Display for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+{}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

impl FromStr for QuadScalar {
    type Err = Error;

    /// Accepts the plain rational form or `a+b*sqrt(d)`, the exact shape
    /// `Display` emits (the `b` part may itself be negative).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some((head, tail)) = s.split_once("*sqrt(") else {
            return Ok(Self::from_rat(parse_rat(s)?));
        };
        let bad = || Error::Parse(format!("invalid scalar `{s}`"));
        let d_text = tail.strip_suffix(')').ok_or_else(bad)?;
        let (a_text, b_text) = head.rsplit_once('+').ok_or_else(bad)?;
        Ok(Self::new(
            parse_rat(a_text)?,
            parse_rat(b_text)?,
            parse_rat(d_text)?,
        ))
    }
}
