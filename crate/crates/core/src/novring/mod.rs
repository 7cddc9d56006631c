//! Exact arithmetic in `Z[[t]][t⁻¹]`: truncated Laurent series, rational
//! functions of the form `P(t) / (t^m Q(t))` with `Q(0) = 1`, their
//! expansion, exact reconstruction from coefficients, and growth rates.

mod fit;
mod growth;
pub mod json;
mod poly;
mod rational;
mod series;

use num_bigint::BigInt;
use thiserror::Error;

pub use fit::fit_rational;
pub use growth::growth_estimate;
pub use poly::Poly;
pub use rational::NovikovRational;
pub use series::LaurentSeries;

pub type IntPoly = Poly<BigInt>;
pub type IntSeries = LaurentSeries<BigInt>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NovringError {
    #[error("lowest coefficient is not a unit")]
    NotInvertible,
    #[error("no recurrence of the requested order fits the known terms")]
    NoFit,
    #[error("need at least {needed} known terms, have {got}")]
    InsufficientTerms { needed: usize, got: usize },
    #[error("denominator cannot be normalized to Q(0) = 1 over the integers")]
    InvalidDenominator,
}

/// `a · b`, truncated to the common window.
pub fn series_mul(a: &IntSeries, b: &IntSeries) -> IntSeries {
    a * b
}

/// Inverse of `a` with `terms` coefficients.
pub fn series_inverse(a: &IntSeries, terms: usize) -> Result<IntSeries, NovringError> {
    a.inverse(terms)
}

/// `t^{-m} P(t) / Q(t)` expanded to `terms` coefficients.
pub fn expand_rational(r: &NovikovRational, terms: usize) -> IntSeries {
    r.expand(terms)
}
