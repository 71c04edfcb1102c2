//! Elliptic divisibility sequences in Morgan Ward's sense: antisymmetric
//! two-sided sequences with `W_0 = 0`, `W_1 = 1`, generated from initial
//! values `W_2, W_3, W_4` by the gap-4 recurrence
//! `W_{h-2} W_{h+2} = W_2² W_{h-1} W_{h+1} - W_3 W_h²`,
//! plus exact verification of the general-gap relation, the symmetric
//! three-term form, and the division property.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::quad::QuadScalar;
use crate::rat::{as_integer, int_gcd};
use crate::seq::{Generator, RelationReport, SomosRelation, TwoSidedSequence, Value};

/// Initial values of an elliptic divisibility sequence; `W_0 = 0` and
/// `W_1 = 1` are fixed. `W_2` and `W_3` must be nonzero so the gap-4
/// recurrence can run; `W_4 = 0` is admissible but may require early
/// fill-in through longer-gap relations.
#[derive(Debug, Clone, PartialEq)]
pub struct EdsInitials {
    w2: QuadScalar,
    w3: QuadScalar,
    w4: QuadScalar,
}

impl EdsInitials {
    pub fn new(w2: QuadScalar, w3: QuadScalar, w4: QuadScalar) -> Result<Self> {
        if w2.is_zero() || w3.is_zero() {
            return Err(Error::Parse("W_2 and W_3 must be nonzero".into()));
        }
        Ok(EdsInitials { w2, w3, w4 })
    }

    pub fn w2(&self) -> &QuadScalar {
        &self.w2
    }

    pub fn w3(&self) -> &QuadScalar {
        &self.w3
    }

    pub fn w4(&self) -> &QuadScalar {
        &self.w4
    }
}

/// Generates the sequence over `range`. The generator is marked
/// self-coherent, so a vanishing divisor is skipped over by deriving the
/// longer-gap relations `(W_m², -W_{m-1} W_{m+1})` from the terms already
/// computed and filling in behind them.
pub fn eds_generate(init: &EdsInitials, range: RangeInclusive<i64>) -> Result<TwoSidedSequence> {
    let primary = SomosRelation::new(4, init.w2.checked_mul(&init.w2)?, -&init.w3)?;
    let mut seq = TwoSidedSequence::from_terms([
        (0, Value::Finite(QuadScalar::zero())),
        (1, Value::Finite(QuadScalar::one())),
        (2, Value::Finite(init.w2.clone())),
        (3, Value::Finite(init.w3.clone())),
        (4, Value::Finite(init.w4.clone())),
    ])?
    .with_generator(Generator {
        relations: vec![primary],
        antisymmetric: true,
        self_coherent: true,
    });
    seq.extend_to(range)?;
    Ok(seq)
}

/// Exact check of `W_{h-m} W_{h+m} = W_m² W_{h-1} W_{h+1} - W_{m-1} W_{m+1} W_h²`
/// for every `h` in `range`.
pub fn verify_ward_general(
    seq: &TwoSidedSequence,
    m: i64,
    range: RangeInclusive<i64>,
) -> Result<RelationReport> {
    if m < 0 {
        return Err(Error::Parse(format!("m must be nonnegative, got {m}")));
    }
    let wm = seq.require_finite(m)?;
    let lambda = wm * wm;
    let mu = -&(seq.require_finite(m - 1)? * seq.require_finite(m + 1)?);
    let mut report = RelationReport::default();
    for h in range {
        let term = |i: i64| -> Result<Option<&QuadScalar>> {
            match seq.get(i) {
                Some(Value::Finite(x)) => Ok(Some(x)),
                Some(Value::Infinite) => Ok(None),
                None if seq.is_undefined_hole(i) => Ok(None),
                None => Err(Error::IndexUndefined(i)),
            }
        };
        let refs = [h - m, h + m, h - 1, h + 1, h];
        let mut vals = Vec::with_capacity(5);
        let mut skip = false;
        for i in refs {
            match term(i)? {
                Some(v) => vals.push(v.clone()),
                None => {
                    skip = true;
                    break;
                }
            }
        }
        if skip {
            report.skipped.push(h);
            continue;
        }
        let lhs = &vals[0] * &vals[1];
        let rhs = &(&lambda * &(&vals[2] * &vals[3])) + &(&mu * &(&vals[4] * &vals[4]));
        report.checked += 1;
        let residual = &lhs - &rhs;
        if !residual.is_zero() {
            report.failures.push((h, residual));
        }
    }
    Ok(report)
}

/// Failures of the symmetric three-term identity, one per triple.
#[derive(Debug, Clone, Default)]
pub struct SymmetricReport {
    pub checked: usize,
    pub skipped: Vec<(i64, i64, i64)>,
    pub failures: Vec<((i64, i64, i64), QuadScalar)>,
}

impl SymmetricReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exact zero test of
/// `W_{h-m} W_{h+m} W_n² + W_{n-h} W_{n+h} W_m² + W_{m-n} W_{m+n} W_h²`
/// for each supplied triple `(h, m, n)`.
pub fn verify_ward_full(
    seq: &TwoSidedSequence,
    triples: &[(i64, i64, i64)],
) -> Result<SymmetricReport> {
    let mut report = SymmetricReport::default();
    'next: for &(h, m, n) in triples {
        let idx = [(h - m, h + m, n), (n - h, n + h, m), (m - n, m + n, h)];
        let mut sum = QuadScalar::zero();
        for (i, j, k) in idx {
            let (a, b, c) = (seq.get(i), seq.get(j), seq.get(k));
            let (Some(a), Some(b), Some(c)) = (a, b, c) else {
                for t in [i, j, k] {
                    if seq.get(t).is_none() && !seq.is_undefined_hole(t) {
                        return Err(Error::IndexUndefined(t));
                    }
                }
                report.skipped.push((h, m, n));
                continue 'next;
            };
            let (Some(a), Some(b), Some(c)) = (a.finite(), b.finite(), c.finite()) else {
                report.skipped.push((h, m, n));
                continue 'next;
            };
            sum = &sum + &(&(a * b) * &(c * c));
        }
        report.checked += 1;
        if !sum.is_zero() {
            report.failures.push(((h, m, n), sum));
        }
    }
    Ok(report)
}

/// A pair `(i, j)` where `gcd(|W_i|, |W_j|)` missed `|W_{gcd(i,j)}|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisionFailure {
    pub i: i64,
    pub j: i64,
    pub got: BigInt,
    pub want: BigInt,
}

#[derive(Debug, Clone, Default)]
pub struct DivisionReport {
    pub checked: usize,
    /// Pairs skipped because one term vanishes (gcd degenerates there).
    pub skipped: Vec<(i64, i64)>,
    pub failures: Vec<DivisionFailure>,
}

impl DivisionReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `gcd(|W_i|, |W_j|) = |W_{gcd(i,j)}|` for all `1 <= i <= j <= bound`.
/// Every term `W_1..W_bound` must be a rational integer.
pub fn check_division_property(seq: &TwoSidedSequence, bound: i64) -> Result<DivisionReport> {
    let mut w = Vec::with_capacity(bound as usize + 1);
    w.push(BigInt::zero()); // W_0, used only through gcd(i, j) >= 1
    for h in 1..=bound {
        let x = seq.require_finite(h)?;
        let r = x.to_rat().map_err(|_| Error::NotIntegral(h))?;
        w.push(as_integer(&r).ok_or(Error::NotIntegral(h))?);
    }
    let mut report = DivisionReport::default();
    for i in 1..=bound {
        for j in i..=bound {
            let (wi, wj) = (&w[i as usize], &w[j as usize]);
            if wi.is_zero() || wj.is_zero() {
                report.skipped.push((i, j));
                continue;
            }
            let g = num_integer::gcd(i, j);
            let got = int_gcd(wi, wj);
            let want = w[g as usize].abs();
            report.checked += 1;
            if got != want {
                report.failures.push(DivisionFailure { i, j, got, want });
            }
        }
    }
    Ok(report)
}
