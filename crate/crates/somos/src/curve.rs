//! Weierstrass curve back end: models `y² + a1·xy + a3·y = x³ + a2·x² + a4·x`
//! (so the base point `S = (0,0)` always lies on the curve), exact affine
//! group law, the quotient sequence `e_h = -x(M + hS)`, and extraction and
//! verification of the invariants `(α², β, γ)` attached to such a
//! sequence.

use std::fmt;
use std::ops::RangeInclusive;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::quad::QuadScalar;
use crate::rat::Rat;
use crate::seq::{TwoSidedSequence, Value};

/// The model `y² + a1·xy + a3·y = x³ + a2·x² + a4·x` with `a6 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveModel {
    a1: Rat,
    a2: Rat,
    a3: Rat,
    a4: Rat,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Affine { x: Rat, y: Rat },
    Infinity,
}

impl Point {
    pub fn affine(x: Rat, y: Rat) -> Self {
        Point::Affine { x, y }
    }

    pub fn x(&self) -> Option<&Rat> {
        match self {
            Point::Affine { x, .. } => Some(x),
            Point::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Affine { x, y } => write!(f, "{x},{y}"),
            Point::Infinity => write!(f, "inf"),
        }
    }
}

impl CurveModel {
    /// Rejects models that are singular at `S = (0,0)`, i.e. `a3 = a4 = 0`.
    pub fn new(a1: Rat, a2: Rat, a3: Rat, a4: Rat) -> Result<Self> {
        if a3.is_zero() && a4.is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(CurveModel { a1, a2, a3, a4 })
    }

    pub fn coefficients(&self) -> (&Rat, &Rat, &Rat, &Rat) {
        (&self.a1, &self.a2, &self.a3, &self.a4)
    }

    /// The distinguished point `S = (0, 0)`.
    pub fn s(&self) -> Point {
        Point::affine(Rat::zero(), Rat::zero())
    }

    /// Exact membership test.
    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine { x, y } => {
                let lhs = y * y + &self.a1 * x * y + &self.a3 * y;
                let rhs = x * x * x + &self.a2 * x * x + &self.a4 * x;
                lhs == rhs
            }
        }
    }

    /// `-(x, y) = (x, -y - a1·x - a3)`.
    pub fn negate(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => Point::affine(x.clone(), -y - &self.a1 * x - &self.a3),
        }
    }

    /// Chord-and-tangent addition with `Infinity` as identity. Total on
    /// curve points: `P + (-P) = Infinity`.
    pub fn add(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1) = match p {
            Point::Infinity => return q.clone(),
            Point::Affine { x, y } => (x, y),
        };
        let (x2, y2) = match q {
            Point::Infinity => return p.clone(),
            Point::Affine { x, y } => (x, y),
        };
        let slope = if x1 == x2 {
            if *q == self.negate(p) {
                return Point::Infinity;
            }
            // Same x and not negatives of each other forces P = Q.
            let numer = Rat::from_integer(3.into()) * x1 * x1
                + Rat::from_integer(2.into()) * &self.a2 * x1
                + &self.a4
                - &self.a1 * y1;
            let denom = Rat::from_integer(2.into()) * y1 + &self.a1 * x1 + &self.a3;
            numer / denom
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &slope * &slope + &self.a1 * &slope - &self.a2 - x1 - x2;
        let y3 = &slope * &(x1 - &x3) - y1 - &self.a1 * &x3 - &self.a3;
        Point::affine(x3, y3)
    }

    /// `k·S` by repeated addition.
    pub fn mul_s(&self, k: i64) -> Point {
        let step = if k < 0 {
            self.negate(&self.s())
        } else {
            self.s()
        };
        let mut acc = Point::Infinity;
        for _ in 0..k.unsigned_abs() {
            acc = self.add(&acc, &step);
        }
        acc
    }

    /// The sequence `e_h = -x(M + hS)` for `h` in `range`, with `Infinite`
    /// marking indices where `M + hS` is the point at infinity. `M` must
    /// lie on the curve; the point at infinity is a legitimate `M` and
    /// yields the singular sequence `ē_h = -x(hS)`.
    pub fn e_sequence(&self, m: &Point, range: RangeInclusive<i64>) -> Result<TwoSidedSequence> {
        if !self.contains(m) {
            return Err(Error::PointNotOnCurve);
        }
        let mut seq = TwoSidedSequence::new();
        let (&lo, &hi) = (range.start(), range.end());
        let s = self.s();
        let neg_s = self.negate(&s);
        let record = |seq: &mut TwoSidedSequence, h: i64, p: &Point| {
            let v = match p.x() {
                Some(x) => Value::Finite(QuadScalar::from_rat(-x)),
                None => Value::Infinite,
            };
            seq.insert(h, v).expect("fresh index");
        };
        let mut p = m.clone();
        for h in 0..=hi {
            if h >= lo {
                record(&mut seq, h, &p);
            }
            p = self.add(&p, &s);
        }
        let mut p = self.add(m, &neg_s);
        for h in (lo..0).rev() {
            record(&mut seq, h, &p);
            p = self.add(&p, &neg_s);
        }
        Ok(seq)
    }

    /// The singular placement: `ē_h = -x(hS)`, infinite at `h = 0`.
    pub fn singular_e_sequence(&self, range: RangeInclusive<i64>) -> Result<TwoSidedSequence> {
        self.e_sequence(&Point::Infinity, range)
    }
}

/// The invariant triple of an elliptic e-sequence. The discriminant of
/// the quadratic extension everything downstream works in is `d = α²`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticData {
    alpha_sq: Rat,
    beta: Rat,
    gamma: Rat,
}

impl EllipticData {
    pub fn new(alpha_sq: Rat, beta: Rat, gamma: Rat) -> Self {
        EllipticData {
            alpha_sq,
            beta,
            gamma,
        }
    }

    pub fn alpha_sq(&self) -> &Rat {
        &self.alpha_sq
    }

    pub fn beta(&self) -> &Rat {
        &self.beta
    }

    pub fn gamma(&self) -> &Rat {
        &self.gamma
    }

    /// The extension discriminant, equal to `α²`.
    pub fn discriminant(&self) -> &Rat {
        &self.alpha_sq
    }

    /// `α` itself: the formal generator of `Q(sqrt(α²))`, collapsing to
    /// the positive rational root when `α²` is a square.
    pub fn alpha(&self) -> QuadScalar {
        QuadScalar::root(self.alpha_sq.clone())
    }
}

impl fmt::Display for EllipticData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha^2={} beta={} gamma={}",
            self.alpha_sq, self.beta, self.gamma
        )
    }
}

fn finite_nonzero(seq: &TwoSidedSequence, h: i64) -> Option<&QuadScalar> {
    match seq.get(h) {
        Some(Value::Finite(x)) if !x.is_zero() => Some(x),
        _ => None,
    }
}

/// Solves for `(α², β)` from the product identity at `h0` and `h0 + 1`,
/// then reads `γ` off the sum identity at `h0`:
///
/// ```text
/// e_{h-1} e_h² e_{h+1} = α² e_h - β
/// (e_{h-1} + e_{h+1}) e_h² = γ e_h - α²
/// ```
///
/// With `h0 = None`, scans forward from the lowest index for the first
/// window where `e_{h0-1}..e_{h0+2}` are finite and nonzero and the 2×2
/// system is nonsingular (it degenerates exactly when `e_{h0} = e_{h0+1}`).
/// The extracted triple is re-verified across every index of the sequence
/// where both identities have finite support; a failure means the input
/// was not an elliptic e-sequence.
pub fn constants_from_e(e: &TwoSidedSequence, h0: Option<i64>) -> Result<EllipticData> {
    let (lo, hi) = e.span().ok_or(Error::EmptySequence)?;
    let candidates: Vec<i64> = match h0 {
        Some(h) => vec![h],
        None => (lo + 1..=hi - 2).collect(),
    };
    let mut chosen = None;
    for h in candidates {
        let window: Option<Vec<&QuadScalar>> =
            (h - 1..=h + 2).map(|i| finite_nonzero(e, i)).collect();
        if let Some(w) = window {
            if w[1] != w[2] {
                chosen = Some(h);
                break;
            }
        }
    }
    let h = chosen.ok_or(Error::DegenerateWindow(h0.unwrap_or(lo + 1)))?;
    let e_at = |i: i64| -> &QuadScalar { finite_nonzero(e, i).expect("validated window") };
    let (em1, e0, ep1, ep2) = (e_at(h - 1), e_at(h), e_at(h + 1), e_at(h + 2));

    // Two rows of e_{h-1} e_h² e_{h+1} = α² e_h - β.
    let p0 = &(em1 * &(e0 * e0)) * ep1;
    let p1 = &(e0 * &(ep1 * ep1)) * ep2;
    let alpha_sq = &(&p0 - &p1) / &(e0 - ep1);
    let beta = &(&alpha_sq * e0) - &p0;
    // γ from the sum identity at h.
    let gamma = &(&(&(em1 + ep1) * &(e0 * e0)) + &alpha_sq) / e0;

    let data = EllipticData::new(alpha_sq.to_rat()?, beta.to_rat()?, gamma.to_rat()?);
    let report = verify_prop_basic(e, &data, lo + 1..=hi - 1)?;
    if !report.holds() {
        return Err(Error::NonConstantInvariants);
    }
    Ok(data)
}

/// One failed identity instance at one index.
#[derive(Debug, Clone)]
pub struct IdentityFailure {
    pub h: i64,
    pub identity: &'static str,
    pub residual: QuadScalar,
}

#[derive(Debug, Clone, Default)]
pub struct IdentityReport {
    pub checked: usize,
    pub skipped: Vec<i64>,
    pub failures: Vec<IdentityFailure>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

type IdentityEval = Box<dyn Fn(&[QuadScalar]) -> (&'static str, QuadScalar)>;

struct IdentityCheck {
    /// Number of consecutive terms starting at `h - 1` the check reads.
    window: i64,
    eval: IdentityEval,
}

fn verify_identities(
    e: &TwoSidedSequence,
    range: RangeInclusive<i64>,
    checks: &[IdentityCheck],
) -> Result<IdentityReport> {
    let mut report = IdentityReport::default();
    for h in range {
        for check in checks {
            let mut vals = Vec::with_capacity(check.window as usize);
            let mut skip = false;
            for i in h - 1..h - 1 + check.window {
                match e.get(i) {
                    Some(Value::Finite(x)) => vals.push(x.clone()),
                    Some(Value::Infinite) => {
                        skip = true;
                        break;
                    }
                    None if e.is_undefined_hole(i) => {
                        skip = true;
                        break;
                    }
                    None => return Err(Error::IndexUndefined(i)),
                }
            }
            if skip {
                if report.skipped.last() != Some(&h) {
                    report.skipped.push(h);
                }
                continue;
            }
            let (name, residual) = (check.eval)(&vals);
            report.checked += 1;
            if !residual.is_zero() {
                report.failures.push(IdentityFailure {
                    h,
                    identity: name,
                    residual,
                });
            }
        }
    }
    Ok(report)
}

/// Exact check of both defining identities at every `h` in `range`: the
/// product form `e_{h-1} e_h² e_{h+1} = α² e_h - β` and the sum form
/// `(e_{h-1} + e_{h+1}) e_h² = γ e_h - α²`. Indices referencing infinite
/// terms are skipped.
pub fn verify_prop_basic(
    e: &TwoSidedSequence,
    data: &EllipticData,
    range: RangeInclusive<i64>,
) -> Result<IdentityReport> {
    let alpha_sq = QuadScalar::from_rat(data.alpha_sq().clone());
    let beta = QuadScalar::from_rat(data.beta().clone());
    let gamma = QuadScalar::from_rat(data.gamma().clone());
    let a2 = alpha_sq.clone();
    let product = IdentityCheck {
        window: 3,
        eval: Box::new(move |w| {
            let lhs = &(&w[0] * &(&w[1] * &w[1])) * &w[2];
            let rhs = &(&alpha_sq * &w[1]) - &beta;
            ("product", &lhs - &rhs)
        }),
    };
    let sum = IdentityCheck {
        window: 3,
        eval: Box::new(move |w| {
            let lhs = &(&w[0] + &w[2]) * &(&w[1] * &w[1]);
            let rhs = &(&gamma * &w[1]) - &a2;
            ("sum", &lhs - &rhs)
        }),
    };
    verify_identities(e, range, &[product, sum])
}

/// Exact check of the corollary identities at every `h` in `range`:
/// `e_{h-1} e_h² e_{h+1}² e_{h+2} = β e_h e_{h+1} + (α⁴ - βγ)` and
/// `α² (e_h + e_{h+1}) = e_h e_{h+1} (γ - e_h e_{h+1}) + β`.
pub fn verify_corollary(
    e: &TwoSidedSequence,
    data: &EllipticData,
    range: RangeInclusive<i64>,
) -> Result<IdentityReport> {
    let alpha_sq = QuadScalar::from_rat(data.alpha_sq().clone());
    let beta = QuadScalar::from_rat(data.beta().clone());
    let gamma = QuadScalar::from_rat(data.gamma().clone());
    let alpha4_minus_bg = &(&alpha_sq * &alpha_sq) - &(&beta * &gamma);
    let (b2, g2) = (beta.clone(), gamma.clone());
    let quartic = IdentityCheck {
        window: 4,
        eval: Box::new(move |w| {
            let lhs = &(&(&w[0] * &(&w[1] * &w[1])) * &(&w[2] * &w[2])) * &w[3];
            let rhs = &(&beta * &(&w[1] * &w[2])) + &alpha4_minus_bg;
            ("quartic-product", &lhs - &rhs)
        }),
    };
    let pair_sum = IdentityCheck {
        window: 4,
        eval: Box::new(move |w| {
            let prod = &w[1] * &w[2];
            let lhs = &alpha_sq * &(&w[1] + &w[2]);
            let rhs = &(&prod * &(&g2 - &prod)) + &b2;
            ("pair-sum", &lhs - &rhs)
        }),
    };
    verify_identities(e, range, &[quartic, pair_sum])
}
