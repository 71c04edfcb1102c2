//! Exact arithmetic for Somos sequences and elliptic divisibility
//! sequences.
//!
//! Everything computes over the rationals or a fixed quadratic extension
//! `Q(sqrt(d))` with zero rounding: sequence generation through bilinear
//! gap-k recurrences, relation fitting and verification, recovery of the
//! elliptic invariants `(α², β, γ)` from a gap-4 sequence, construction
//! of the companion divisibility sequence whose terms furnish the
//! coefficients of the gap-k relation for every `k >= 4`, and the
//! Weierstrass curve back end the examples come from.

pub mod curve;
pub mod eds;
pub mod error;
pub mod io;
pub mod lift;
pub mod quad;
pub mod rat;
pub mod seq;
pub mod somos5;

pub use error::{Error, Result};
pub use quad::QuadScalar;
pub use rat::Rat;
pub use seq::{SomosRelation, TwoSidedSequence, Value};
