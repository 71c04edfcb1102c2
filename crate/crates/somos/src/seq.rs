//! Two-sided memoized sequences and the bilinear recurrence engine.
//!
//! A `TwoSidedSequence` maps integer indices (negative, zero, positive)
//! to exact values. Terms are write-once: once an index holds a value it
//! never changes, so concurrent readers of a frozen snapshot never
//! observe movement. Extension works through `SomosRelation`s in both
//! directions; when the trailing divisor of one relation vanishes the
//! engine falls back to any longer-gap relations it has been given (or,
//! for self-coherent sequences, derives them from its own terms) before
//! declaring the index undefined.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::quad::QuadScalar;

/// A sequence term: a finite scalar, or the infinite marker produced by
/// quotients whose denominator vanishes. `Finite(0)` is an ordinary
/// value, distinct from `Infinite`.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Finite(QuadScalar),
    Infinite,
}

impl Value {
    pub fn finite(&self) -> Option<&QuadScalar> {
        match self {
            Value::Finite(x) => Some(x),
            Value::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Value::Infinite)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Finite(x) => write!(f, "{x}"),
            Value::Infinite => write!(f, "inf"),
        }
    }
}

/// A three-term Somos relation of gap `k >= 4`.
///
/// For `k = 2m` it asserts `D_{h-m} D_{h+m} = λ D_{h-1} D_{h+1} + μ D_h²`;
/// for `k = 2m+1` it asserts
/// `D_{h-m} D_{h+m+1} = λ D_{h-1} D_{h+2} + μ D_h D_{h+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SomosRelation {
    gap: i64,
    lambda: QuadScalar,
    mu: QuadScalar,
}

impl SomosRelation {
    pub fn new(gap: i64, lambda: QuadScalar, mu: QuadScalar) -> Result<Self> {
        if gap < 4 {
            return Err(Error::Parse(format!("gap must be at least 4, got {gap}")));
        }
        Ok(SomosRelation { gap, lambda, mu })
    }

    pub fn gap(&self) -> i64 {
        self.gap
    }

    pub fn lambda(&self) -> &QuadScalar {
        &self.lambda
    }

    pub fn mu(&self) -> &QuadScalar {
        &self.mu
    }

    /// The `m` of the gap: `2m` or `2m+1`.
    pub fn half_gap(&self) -> i64 {
        self.gap / 2
    }

    pub fn is_even_gap(&self) -> bool {
        self.gap % 2 == 0
    }

    /// Indices referenced when the relation is evaluated at `h`.
    pub fn referenced(&self, h: i64) -> Vec<i64> {
        let m = self.half_gap();
        if self.is_even_gap() {
            vec![h - m, h + m, h - 1, h + 1, h]
        } else {
            vec![h - m, h + m + 1, h - 1, h + 2, h, h + 1]
        }
    }

    /// The subrange of `h` whose references stay within `[lo, hi]`.
    pub fn checkable_range(&self, lo: i64, hi: i64) -> RangeInclusive<i64> {
        let m = self.half_gap();
        if self.is_even_gap() {
            lo + m..=hi - m
        } else {
            lo + m..=hi - m - 1
        }
    }

    /// Exact residual `lhs - rhs` at `h`; `None` when a referenced term
    /// is infinite or an undefined hole.
    fn residual_at(&self, seq: &TwoSidedSequence, h: i64) -> Result<Option<QuadScalar>> {
        let m = self.half_gap();
        let term = |i: i64| -> Result<Option<QuadScalar>> {
            match seq.slot(i) {
                Some(Slot::Known(Value::Finite(x))) => Ok(Some(x.clone())),
                Some(Slot::Known(Value::Infinite)) | Some(Slot::Undefined) => Ok(None),
                None => Err(Error::IndexUndefined(i)),
            }
        };
        let (outer, inner) = if self.is_even_gap() {
            ((h - m, h + m), (h - 1, h + 1, h, h))
        } else {
            ((h - m, h + m + 1), (h - 1, h + 2, h, h + 1))
        };
        let idx = [outer.0, outer.1, inner.0, inner.1, inner.2, inner.3];
        let mut vals = Vec::with_capacity(6);
        for i in idx {
            match term(i)? {
                Some(v) => vals.push(v),
                None => return Ok(None),
            }
        }
        let lhs = &vals[0] * &vals[1];
        let rhs = &(&self.lambda * &(&vals[2] * &vals[3])) + &(&self.mu * &(&vals[4] * &vals[5]));
        Ok(Some(&lhs - &rhs))
    }
}

impl fmt::Display for SomosRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{},{}", self.gap, self.lambda, self.mu)
    }
}

/// Recurrence descriptor enabling on-demand extension.
#[derive(Debug, Clone)]
pub struct Generator {
    /// Relations tried in order; the first whose terms are available and
    /// whose divisor is nonzero computes the new term.
    pub relations: Vec<SomosRelation>,
    /// `D_{-h} = -D_h`; negative indices mirror positive ones.
    pub antisymmetric: bool,
    /// The sequence satisfies the gap-k relations built from its own
    /// terms (the elliptic-divisibility situation), so fill-in relations
    /// may be derived on demand when a divisor vanishes.
    pub self_coherent: bool,
}

impl Generator {
    pub fn from_relation(rel: SomosRelation) -> Self {
        Generator {
            relations: vec![rel],
            antisymmetric: false,
            self_coherent: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Slot {
    Known(Value),
    /// Every applicable recurrence divides by zero here.
    Undefined,
}

#[derive(Debug, Clone, Default)]
pub struct TwoSidedSequence {
    terms: BTreeMap<i64, Slot>,
    generator: Option<Generator>,
}

impl TwoSidedSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Value)>,
    {
        let mut seq = Self::new();
        for (h, v) in terms {
            seq.insert(h, v)?;
        }
        Ok(seq)
    }

    pub fn with_generator(mut self, generator: Generator) -> Self {
        self.generator = Some(generator);
        self
    }

    pub fn generator(&self) -> Option<&Generator> {
        self.generator.as_ref()
    }

    /// Adds a fill-in relation for the extension engine to fall back on.
    pub fn add_fill_in_relation(&mut self, rel: SomosRelation) {
        match &mut self.generator {
            Some(g) => {
                if !g.relations.contains(&rel) {
                    g.relations.push(rel);
                }
            }
            None => self.generator = Some(Generator::from_relation(rel)),
        }
    }

    /// Drops the generator; the snapshot is immutable from here on and
    /// freely shareable across threads.
    pub fn freeze(mut self) -> Self {
        self.generator = None;
        self
    }

    /// Write-once insertion. Re-inserting the identical value is a no-op;
    /// a conflicting value for an already-known index is rejected.
    pub fn insert(&mut self, h: i64, v: Value) -> Result<()> {
        match self.terms.get(&h) {
            Some(Slot::Known(old)) if *old == v => Ok(()),
            Some(Slot::Known(_)) => Err(Error::Parse(format!("conflicting value for index {h}"))),
            // An undefined hole may later be filled in.
            Some(Slot::Undefined) | None => {
                self.terms.insert(h, Slot::Known(v));
                Ok(())
            }
        }
    }

    fn slot(&self, h: i64) -> Option<&Slot> {
        self.terms.get(&h)
    }

    pub fn get(&self, h: i64) -> Option<&Value> {
        match self.terms.get(&h) {
            Some(Slot::Known(v)) => Some(v),
            _ => None,
        }
    }

    pub fn require(&self, h: i64) -> Result<&Value> {
        self.get(h).ok_or(Error::IndexUndefined(h))
    }

    pub fn require_finite(&self, h: i64) -> Result<&QuadScalar> {
        match self.require(h)? {
            Value::Finite(x) => Ok(x),
            Value::Infinite => Err(Error::InfiniteTerm(h)),
        }
    }

    pub fn is_undefined_hole(&self, h: i64) -> bool {
        matches!(self.terms.get(&h), Some(Slot::Undefined))
    }

    /// Smallest and largest index with any state (known or hole).
    pub fn span(&self) -> Option<(i64, i64)> {
        let lo = self.terms.keys().next()?;
        let hi = self.terms.keys().next_back()?;
        Some((*lo, *hi))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Value)> {
        self.terms.iter().filter_map(|(h, s)| match s {
            Slot::Known(v) => Some((*h, v)),
            Slot::Undefined => None,
        })
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn known_finite(&self, h: i64) -> Option<&QuadScalar> {
        match self.terms.get(&h) {
            Some(Slot::Known(Value::Finite(x))) => Some(x),
            _ => None,
        }
    }

    /// Attempts one extension step to index `n` using `rel`. Returns the
    /// new value, or `None` when a referenced term is unavailable or the
    /// divisor vanishes.
    fn step(&self, rel: &SomosRelation, n: i64, forward: bool) -> Option<QuadScalar> {
        let m = rel.half_gap();
        let (div_idx, p, q, r, s) = if rel.is_even_gap() {
            if forward {
                (n - 2 * m, n - m - 1, n - m + 1, n - m, n - m)
            } else {
                (n + 2 * m, n + m - 1, n + m + 1, n + m, n + m)
            }
        } else if forward {
            (n - 2 * m - 1, n - m - 2, n - m + 1, n - m - 1, n - m)
        } else {
            (n + 2 * m + 1, n + m - 1, n + m + 2, n + m, n + m + 1)
        };
        let div = self.known_finite(div_idx)?;
        if div.is_zero() {
            return None;
        }
        let p = self.known_finite(p)?;
        let q = self.known_finite(q)?;
        let r = self.known_finite(r)?;
        let s = self.known_finite(s)?;
        let numer = &(rel.lambda() * &(p * q)) + &(rel.mu() * &(r * s));
        Some(&numer / div)
    }

    /// For a self-coherent sequence, derives gap-k relations whose
    /// coefficients are terms of the sequence itself:
    /// `(W_m², -W_{m-1} W_{m+1})` for gap `2m` and
    /// `(W_m W_{m+1} / W_2, -W_{m-1} W_{m+2} / W_2)` for gap `2m+1`.
    /// Returns how many new relations were added.
    fn derive_self_relations(&mut self) -> usize {
        let Some((_, hi)) = self.span() else {
            return 0;
        };
        let Some(g) = &self.generator else {
            return 0;
        };
        let mut existing: Vec<i64> = g.relations.iter().map(|r| r.gap()).collect();
        let w2_inv = self
            .known_finite(2)
            .filter(|w2| !w2.is_zero())
            .map(|w2| w2.inv().expect("nonzero"));
        let mut added = Vec::new();
        for m in 2..=hi / 2 {
            if !existing.contains(&(2 * m)) {
                if let (Some(wm), Some(wlo), Some(whi)) = (
                    self.known_finite(m),
                    self.known_finite(m - 1),
                    self.known_finite(m + 1),
                ) {
                    let rel = SomosRelation::new(2 * m, wm * wm, -&(wlo * whi)).expect("gap >= 4");
                    existing.push(2 * m);
                    added.push(rel);
                }
            }
            if !existing.contains(&(2 * m + 1)) {
                if let (Some(inv), Some(wm), Some(wm1), Some(wlo), Some(whi)) = (
                    w2_inv.as_ref(),
                    self.known_finite(m),
                    self.known_finite(m + 1),
                    self.known_finite(m - 1),
                    self.known_finite(m + 2),
                ) {
                    let rel =
                        SomosRelation::new(2 * m + 1, &(wm * wm1) * inv, -&(&(wlo * whi) * inv))
                            .expect("gap >= 4");
                    existing.push(2 * m + 1);
                    added.push(rel);
                }
            }
        }
        let count = added.len();
        if count > 0 {
            let g = self.generator.as_mut().expect("checked above");
            g.relations.extend(added);
        }
        count
    }

    /// Computes the term at `n`, preferring steps in the given direction
    /// but falling back to the other when support only exists there.
    /// A known value is left untouched; an undefined hole is retried.
    fn compute_term(&mut self, n: i64, forward: bool) -> Result<()> {
        if matches!(self.terms.get(&n), Some(Slot::Known(_))) {
            return Ok(());
        }
        loop {
            let g = self.generator.as_ref().ok_or(Error::MissingGenerator)?;
            let relations = g.relations.clone();
            let value = relations
                .iter()
                .find_map(|rel| self.step(rel, n, forward))
                .or_else(|| relations.iter().find_map(|rel| self.step(rel, n, !forward)));
            if let Some(v) = value {
                return self.insert(n, Value::Finite(v));
            }
            if self.generator.as_ref().is_some_and(|g| g.self_coherent)
                && self.derive_self_relations() > 0
            {
                continue;
            }
            self.terms.entry(n).or_insert(Slot::Undefined);
            return Err(Error::ZeroDivision(n));
        }
    }

    fn mirror_term(&mut self, n: i64) -> Result<()> {
        if matches!(self.terms.get(&n), Some(Slot::Known(_))) {
            return Ok(());
        }
        match self.slot(-n) {
            Some(Slot::Known(Value::Finite(x))) => {
                let v = -x;
                self.insert(n, Value::Finite(v))
            }
            Some(Slot::Known(Value::Infinite)) => self.insert(n, Value::Infinite),
            Some(Slot::Undefined) | None => {
                self.terms.entry(n).or_insert(Slot::Undefined);
                Err(Error::ZeroDivision(n))
            }
        }
    }

    /// Extends the sequence so every index in `range` has been attempted,
    /// retrying any undefined holes along the way. Stops with
    /// `ZeroDivision(h)` at the first index no available relation can
    /// produce; that index is left marked undefined, and the caller may
    /// supply fill-in relations and extend again.
    pub fn extend_to(&mut self, range: RangeInclusive<i64>) -> Result<()> {
        let g = self.generator.as_ref().ok_or(Error::MissingGenerator)?;
        let antisymmetric = g.antisymmetric;
        let (lo, _) = self.span().ok_or(Error::EmptySequence)?;
        let (&start, &end) = (range.start(), range.end());

        if antisymmetric {
            // Positive side by recurrence, negative side by mirroring.
            let forward_end = end.max(-start);
            for n in lo.max(0)..=forward_end {
                self.compute_term(n, true)?;
            }
            for n in (start..0.min(end + 1)).rev() {
                self.mirror_term(n)?;
            }
        } else {
            for n in lo..=end {
                self.compute_term(n, true)?;
            }
            for n in (start..lo).rev() {
                self.compute_term(n, false)?;
            }
        }
        Ok(())
    }
}

/// Report from an exact relation check over a window.
#[derive(Debug, Clone, Default)]
pub struct RelationReport {
    /// Indices checked exactly.
    pub checked: usize,
    /// Indices skipped because a referenced term was infinite or an
    /// undefined hole.
    pub skipped: Vec<i64>,
    /// `(h, lhs - rhs)` for every failing index.
    pub failures: Vec<(i64, QuadScalar)>,
}

impl RelationReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first_failure(&self) -> Option<i64> {
        self.failures.first().map(|(h, _)| *h)
    }
}

/// Generates a gap-4 sequence from four consecutive finite values placed
/// at `start..start+3`, extended across `range` in both directions.
pub fn extend_somos4(
    start: i64,
    init: [QuadScalar; 4],
    rel: &SomosRelation,
    range: RangeInclusive<i64>,
) -> Result<TwoSidedSequence> {
    extend_with_gap(4, start, &init, rel, range)
}

/// Gap-5 analogue of [`extend_somos4`] with five initial values.
pub fn extend_somos5(
    start: i64,
    init: [QuadScalar; 5],
    rel: &SomosRelation,
    range: RangeInclusive<i64>,
) -> Result<TwoSidedSequence> {
    extend_with_gap(5, start, &init, rel, range)
}

fn extend_with_gap(
    gap: i64,
    start: i64,
    init: &[QuadScalar],
    rel: &SomosRelation,
    range: RangeInclusive<i64>,
) -> Result<TwoSidedSequence> {
    if rel.gap() != gap {
        return Err(Error::WrongGap {
            expected: gap,
            got: rel.gap(),
        });
    }
    let mut seq = TwoSidedSequence::from_terms(
        init.iter()
            .enumerate()
            .map(|(i, x)| (start + i as i64, Value::Finite(x.clone()))),
    )?
    .with_generator(Generator::from_relation(rel.clone()));
    seq.extend_to(range)?;
    Ok(seq)
}

/// Exact check of `rel` at every `h` in `range`. Referenced indices must
/// exist in the sequence; indices whose referenced terms are infinite or
/// undefined holes are reported as skipped.
pub fn verify_relation(
    seq: &TwoSidedSequence,
    rel: &SomosRelation,
    range: RangeInclusive<i64>,
) -> Result<RelationReport> {
    let mut report = RelationReport::default();
    for h in range {
        match rel.residual_at(seq, h)? {
            Some(residual) => {
                report.checked += 1;
                if !residual.is_zero() {
                    report.failures.push((h, residual));
                }
            }
            None => report.skipped.push(h),
        }
    }
    Ok(report)
}

/// The quotient `e_h = D_{h-1} D_{h+1} / D_h²`: `Infinite` when `D_h = 0`
/// with a nonzero numerator, an error when both vanish.
pub fn e_of(seq: &TwoSidedSequence, h: i64) -> Result<Value> {
    let prev = seq.require_finite(h - 1)?;
    let mid = seq.require_finite(h)?;
    let next = seq.require_finite(h + 1)?;
    let numer = prev * next;
    if mid.is_zero() {
        if numer.is_zero() {
            return Err(Error::IndeterminateQuotient(h));
        }
        return Ok(Value::Infinite);
    }
    Ok(Value::Finite(&numer / &(mid * mid)))
}

/// The e-quotient sequence of `seq` over `range`, skipping indices where
/// the quotient is indeterminate.
pub fn e_sequence_of(seq: &TwoSidedSequence, range: RangeInclusive<i64>) -> TwoSidedSequence {
    let mut out = TwoSidedSequence::new();
    for h in range {
        if let Ok(v) = e_of(seq, h) {
            out.insert(h, v).expect("fresh index");
        }
    }
    out
}
