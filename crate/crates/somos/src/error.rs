use crate::rat::Rat;

/// Crate-wide error type. Every failure mode is a value the caller can
/// match on; nothing here carries dynamic state beyond the offending
/// index or scalar.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands lie in different quadratic extensions: sqrt({}) vs sqrt({})", .0.0, .0.1)]
    MismatchedDiscriminant(Box<(Rat, Rat)>),
    #[error("scalar has no inverse")]
    NotInvertible,
    #[error("scalar is not rational (nonzero sqrt part)")]
    NotRational,
    #[error("zero divisor while extending sequence to index {0}")]
    ZeroDivision(i64),
    #[error("index {0} is not defined in the sequence")]
    IndexUndefined(i64),
    #[error("term at index {0} is infinite")]
    InfiniteTerm(i64),
    #[error("indeterminate 0/0 quotient at index {0}")]
    IndeterminateQuotient(i64),
    #[error("window at index {0} is degenerate")]
    DegenerateWindow(i64),
    #[error("fit system is singular")]
    DegenerateFit,
    #[error("sequence does not satisfy a gap-{gap} relation (first failure at h = {failed_at})")]
    NotSomos { gap: i64, failed_at: i64 },
    #[error("extracted invariants are not constant across the sequence")]
    NonConstantInvariants,
    #[error("derived gap-{gap} coefficient is not rational")]
    NonRationalCoefficient { gap: i64 },
    #[error("derived gap-{gap} relation fails on the sequence at h = {failed_at}")]
    RelationVerificationFailed { gap: i64, failed_at: i64 },
    #[error("term at index {0} is not an integer")]
    NotIntegral(i64),
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("curve is singular at the base point (a3 = a4 = 0)")]
    SingularCurve,
    #[error("expected a gap-{expected} relation, got gap {got}")]
    WrongGap { expected: i64, got: i64 },
    #[error("sequence has no generator to extend with")]
    MissingGenerator,
    #[error("sequence has no terms")]
    EmptySequence,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
