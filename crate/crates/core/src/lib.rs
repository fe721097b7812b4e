//! Exact power-series tests for relations in tautological rings of strata
//! of differentials, plus the closed-form bounds, counts and Siegel–Veech
//! checks that go with them.
//!
//! The series layer is generic over a [`CoefficientRing`]; the concrete
//! rings used throughout are [`Rationals`] and [`PrimeField`].

pub mod combinatorics;
pub mod harness;
pub mod ranges;
pub mod relation;
pub mod series;
pub mod siegel_veech;
pub mod signature;
pub mod special;

pub use num_rational::BigRational;
pub use relation::{
    check_conjecture, CheckMode, Checker, ModularOptions, Status, VerificationRecord,
};
pub use series::{CoefficientRing, Integers, PrimeField, Rationals, SeriesError, TruncatedSeries};
pub use signature::{QuadraticSignatureGenus0, StratumSignature};

/// Exact rational coefficients.
pub type Rational = BigRational;
/// A truncated series over Q.
pub type RationalSeries = TruncatedSeries<Rationals>;
/// A truncated series over F_p.
pub type ModPSeries = TruncatedSeries<PrimeField>;
/// A truncated series over Z.
pub type IntegerSeries = TruncatedSeries<Integers>;
