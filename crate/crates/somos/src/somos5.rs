//! Somos-5 machinery: building a gap-5 sequence from curve data through
//! `c_h B_{h-1} B_{h+1} = e_h B_h²` with parity-constant `c`, fitting
//! gap-5 coefficients, deriving the odd-gap relation family
//!
//! ```text
//! v^{m(m+1)/2} W_1 W_2 · B_{h-m} B_{h+m+1}
//!     = v W_m W_{m+1} · B_{h-1} B_{h+2} - W_{m-1} W_{m+2} · B_h B_{h+1}
//! ```
//!
//! and splitting a gap-5 sequence into its two gap-4 parity subsequences.
//! Every derived relation is re-verified against the supplied sequence
//! before it is returned; the `v`-power and the `B_{h-1} B_{h+2}` reading
//! of the middle product are pinned by those checks.

use std::ops::RangeInclusive;

use num_traits::Zero;

use crate::curve::{CurveModel, Point};
use crate::error::{Error, Result};
use crate::lift::{fit_relation, CompanionEds};
use crate::quad::QuadScalar;
use crate::rat::{rat_pow, Rat};
use crate::seq::{verify_relation, SomosRelation, TwoSidedSequence, Value};

/// The data a curve-backed Somos-5 carries: the two parity constants
/// `c_0` (even indices) and `c_1` (odd indices), their product `v`, and
/// the companion divisibility sequence of the underlying invariants.
#[derive(Debug, Clone)]
pub struct Somos5Data {
    v: Rat,
    c0: Rat,
    c1: Rat,
    w: CompanionEds,
}

impl Somos5Data {
    pub fn new(c0: Rat, c1: Rat, w: CompanionEds) -> Result<Self> {
        if c0.is_zero() || c1.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Somos5Data {
            v: &c0 * &c1,
            c0,
            c1,
            w,
        })
    }

    /// Derives the invariants from the curve's e-sequence and builds the
    /// companion out to `w_range`.
    pub fn from_curve(
        curve: &CurveModel,
        m: &Point,
        c0: Rat,
        c1: Rat,
        w_range: RangeInclusive<i64>,
    ) -> Result<Self> {
        let e = curve.e_sequence(m, -8..=8)?;
        let data = crate::curve::constants_from_e(&e, None)?;
        let w = crate::lift::companion_eds(&data, w_range)?;
        Self::new(c0, c1, w)
    }

    pub fn v(&self) -> &Rat {
        &self.v
    }

    pub fn c0(&self) -> &Rat {
        &self.c0
    }

    pub fn c1(&self) -> &Rat {
        &self.c1
    }

    pub fn c(&self, h: i64) -> &Rat {
        if h.rem_euclid(2) == 0 {
            &self.c0
        } else {
            &self.c1
        }
    }

    pub fn companion(&self) -> &CompanionEds {
        &self.w
    }
}

/// Recovers the gap-5 coefficients of a Somos-5 sequence.
pub fn fit_somos5(seq: &TwoSidedSequence, h0: Option<i64>) -> Result<SomosRelation> {
    fit_relation(seq, 5, h0)
}

/// Builds `B` over `range` from `B_0 = init[0]`, `B_1 = init[1]` by
/// `B_{h+1} = e_h B_h² / (c_h B_{h-1})` forward and its mirror backward,
/// with `c_h = c0` at even `h` and `c1` at odd `h`. B stays constant
/// exactly when `e_h = c_h` at every step, a fixed point no nonsingular
/// curve realizes for parity-constant `c`.
pub fn somos5_from_curve(
    curve: &CurveModel,
    m: &Point,
    c0: &Rat,
    c1: &Rat,
    init: [Rat; 2],
    range: RangeInclusive<i64>,
) -> Result<TwoSidedSequence> {
    if c0.is_zero() || c1.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let (&lo, &hi) = (range.start(), range.end());
    let e = curve.e_sequence(m, lo - 1..=hi)?;
    let c = |h: i64| -> &Rat {
        if h.rem_euclid(2) == 0 {
            c0
        } else {
            c1
        }
    };
    let mut seq = TwoSidedSequence::from_terms([
        (0, Value::Finite(QuadScalar::from_rat(init[0].clone()))),
        (1, Value::Finite(QuadScalar::from_rat(init[1].clone()))),
    ])?;
    let e_at = |h: i64| -> Result<&QuadScalar> {
        match e.require(h)? {
            Value::Finite(x) => Ok(x),
            Value::Infinite => Err(Error::InfiniteTerm(h)),
        }
    };
    for h in 1..hi {
        let prev = seq.require_finite(h - 1)?.clone();
        let here = seq.require_finite(h)?.clone();
        if prev.is_zero() {
            return Err(Error::ZeroDivision(h + 1));
        }
        let ch = QuadScalar::from_rat(c(h).clone());
        let next = &(e_at(h)? * &(&here * &here)) / &(&ch * &prev);
        seq.insert(h + 1, Value::Finite(next))?;
    }
    for h in (lo + 1..=0).rev() {
        let here = seq.require_finite(h)?.clone();
        let next = seq.require_finite(h + 1)?.clone();
        if next.is_zero() {
            return Err(Error::ZeroDivision(h - 1));
        }
        let ch = QuadScalar::from_rat(c(h).clone());
        let prev = &(e_at(h)? * &(&here * &here)) / &(&ch * &next);
        seq.insert(h - 1, Value::Finite(prev))?;
    }
    Ok(seq)
}

/// The normalized odd-gap relation of gap `2m + 1` for `m >= 2`:
/// `λ = v W_m W_{m+1} / (v^{m(m+1)/2} W_1 W_2)` and
/// `μ = -W_{m-1} W_{m+2} / (v^{m(m+1)/2} W_1 W_2)`, together with the
/// scale exponent `m(m+1)/2`. The relation is verified exactly against
/// `b` before being returned. (At `m = 1` the family degenerates to the
/// identity `λ = 1, μ = 0` and carries no information.)
pub fn somos5_odd_gap_relation(
    data: &Somos5Data,
    b: &TwoSidedSequence,
    m: i64,
) -> Result<(SomosRelation, i64)> {
    if m < 2 {
        return Err(Error::Parse(format!("m must be at least 2, got {m}")));
    }
    let v_exp = m * (m + 1) / 2;
    let w = data.companion();
    let v = QuadScalar::from_rat(data.v().clone());
    let scale = QuadScalar::from_rat(rat_pow(data.v(), v_exp)?);
    let denom = &scale * w.term(2)?;
    if denom.is_zero() {
        return Err(Error::ZeroDivision(2));
    }
    let lambda = &(&v * &(w.term(m)? * w.term(m + 1)?)) / &denom;
    let mu = -&(&(w.term(m - 1)? * w.term(m + 2)?) / &denom);
    let rational = |x: QuadScalar| -> Result<QuadScalar> {
        if x.is_rational() {
            Ok(x)
        } else {
            Err(Error::NonRationalCoefficient { gap: 2 * m + 1 })
        }
    };
    let rel = SomosRelation::new(2 * m + 1, rational(lambda)?, rational(mu)?)?;

    let (lo, hi) = b.span().ok_or(Error::EmptySequence)?;
    let report = verify_relation(b, &rel, rel.checkable_range(lo, hi))?;
    if report.checked == 0 {
        return Err(Error::DegenerateWindow(lo));
    }
    if let Some(h) = report.first_failure() {
        return Err(Error::RelationVerificationFailed {
            gap: 2 * m + 1,
            failed_at: h,
        });
    }
    Ok((rel, v_exp))
}

/// The two parity subsequences of `b`, reindexed consecutively, each with
/// its gap-4 fit attempt attached (fit failures are reported, not thrown).
#[derive(Debug)]
pub struct ParitySplit {
    pub even: TwoSidedSequence,
    pub odd: TwoSidedSequence,
    pub even_fit: Result<SomosRelation>,
    pub odd_fit: Result<SomosRelation>,
}

pub fn interleave_split(b: &TwoSidedSequence) -> ParitySplit {
    let mut even = TwoSidedSequence::new();
    let mut odd = TwoSidedSequence::new();
    for (h, v) in b.iter() {
        let target = if h.rem_euclid(2) == 0 {
            &mut even
        } else {
            &mut odd
        };
        target
            .insert(h.div_euclid(2), v.clone())
            .expect("fresh index");
    }
    let even_fit = crate::lift::fit_somos4(&even, None);
    let odd_fit = crate::lift::fit_somos4(&odd, None);
    ParitySplit {
        even,
        odd,
        even_fit,
        odd_fit,
    }
}
