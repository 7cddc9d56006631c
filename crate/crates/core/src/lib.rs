//! Exact and numerical tools around the Novikov complex of a circle-valued
//! Morse function.
//!
//! * [`novring`]: truncated Laurent series over `Z` and rational functions
//!   `P(t) / (t^m Q(t))` with `Q(0) = 1`; expansion, exact reconstruction,
//!   growth rates.
//! * [`transfer`]: incidence series from an integer transfer matrix,
//!   `Σ λ(A^k p) t^k = P(t) / det(I − At)`, with a brute-force oracle.
//! * [`modelflow`]: the standard saddle flow `(x e^t, y e^{-t})`, residence
//!   times in annuli and lenses, and the radial rescaling that caps them.
//! * [`stability`]: fixed-step RK4 with Richardson error estimates,
//!   Gronwall separation bounds, transversal crossings and reachability.
//! * [`torus`]: a circle-valued Morse function on the 2-torus, signed flow
//!   line counts in its infinite cyclic cover, and the resulting complex.

pub mod modelflow;
pub mod novring;
pub mod scalar;
pub mod stability;
pub mod torus;
pub mod transfer;

pub use novring::{IntPoly, IntSeries, LaurentSeries, NovikovRational, Poly};
pub use scalar::{Real, Ring};

/// Rational-coefficient polynomials, used internally for gcds and fitting.
pub type RatPoly = Poly<num_rational::BigRational>;
/// Truncated series with machine-integer coefficients.
pub type I64Series = LaurentSeries<i64>;

pub type ModelPoint64 = modelflow::ModelPoint<f64>;
pub type ModelPoint32 = modelflow::ModelPoint<f32>;
pub type AParams64 = modelflow::AConstructionParams<f64>;
pub type FieldSpec64 = stability::FieldSpec<f64>;
pub type FieldSpec32 = stability::FieldSpec<f32>;
pub type Trajectory64 = stability::TrajectoryRecord<f64>;
