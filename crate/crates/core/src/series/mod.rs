//! Exact arithmetic on truncated formal power series.

mod ring;
mod truncated;

pub use ring::{
    is_prime, next_prime, p_divides_denominator, render_rational, CoefficientRing, Integers,
    PrimeField, Rationals,
};
pub use truncated::{reduce_mod_p, TruncatedSeries};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("operands live in different coefficient rings ({0} vs {1})")]
    RingMismatch(String, String),
    #[error("constant term is not a unit")]
    NonUnitConstant,
    /// A division by something that vanishes mod p. Callers treat this as
    /// "try another prime", never as a mathematical answer.
    #[error("prime {0} is inadmissible: a denominator vanishes mod {0}")]
    InadmissiblePrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not a prime below 2^32")]
    NotPrime(u64),
    #[error("log requires constant term 1")]
    LogConstantNotOne,
    #[error("exp requires constant term 0")]
    ExpConstantNotZero,
}
