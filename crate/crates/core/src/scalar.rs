//! Scalar abstractions shared by the exact and the numerical halves of the crate.
//!
//! Exact code (polynomials, truncated series) is written against [`Ring`];
//! numerical code (flows, integrators, bounds) against [`Real`]. Concrete
//! aliases for the common instantiations live at the crate root.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, One, Signed, Zero};

/// A commutative ring with unit, usable as a polynomial or series coefficient.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Multiplicative inverse, when `self` is a unit of the ring.
    fn unit_inverse(&self) -> Option<Self>;
}

impl Ring for BigInt {
    fn unit_inverse(&self) -> Option<Self> {
        if self.abs().is_one() {
            Some(self.clone())
        } else {
            None
        }
    }
}

impl Ring for i64 {
    fn unit_inverse(&self) -> Option<Self> {
        matches!(*self, 1 | -1).then_some(*self)
    }
}

impl Ring for BigRational {
    fn unit_inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }
}

/// Floating point scalar for the numerical modules (`f32` or `f64`).
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite float")
    }
}

impl<T> Real for T where T: Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static {}
