//! Truncated Laurent series `Σ_{k≥N} a_k t^k` with finitely many known terms.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::poly::Poly;
use super::NovringError;
use crate::scalar::Ring;

/// A Laurent series known on the exponent window `[lead, lead + K)`.
///
/// Coefficients below `lead` are exactly zero; coefficients at or above
/// `lead + K` (the absolute precision) are unknown. In canonical form the
/// coefficient at `lead` is nonzero whenever `K > 0`, so a zero series has
/// `K = 0` and `lead` equal to its precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries<T> {
    lead: i64,
    coeffs: Vec<T>,
}

impl<T: Ring> LaurentSeries<T> {
    pub fn new(lead: i64, coeffs: Vec<T>) -> Self {
        let skip = coeffs.iter().take_while(|c| c.is_zero()).count();
        Self {
            lead: lead + skip as i64,
            coeffs: coeffs.into_iter().skip(skip).collect(),
        }
    }

    /// Zero series known up to (but excluding) exponent `precision`.
    pub fn zero(precision: i64) -> Self {
        Self {
            lead: precision,
            coeffs: Vec::new(),
        }
    }

    /// `t^shift · p`, known for exponents `< precision`.
    pub fn from_poly(p: &Poly<T>, shift: i64, precision: i64) -> Self {
        let len = (precision - shift).max(0) as usize;
        let coeffs = (0..len).map(|i| p.coeff(i)).collect();
        if len == 0 {
            return Self::zero(precision);
        }
        Self::new(shift, coeffs)
    }

    pub fn lead(&self) -> i64 {
        self.lead
    }

    /// Number of known coefficients starting at `lead`.
    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    /// First exponent whose coefficient is unknown.
    pub fn precision(&self) -> i64 {
        self.lead + self.coeffs.len() as i64
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `t^e`, `None` past the known window.
    pub fn coeff(&self, e: i64) -> Option<T> {
        if e < self.lead {
            Some(T::zero())
        } else if e < self.precision() {
            Some(self.coeffs[(e - self.lead) as usize].clone())
        } else {
            None
        }
    }

    /// True when every known coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            lead: self.lead + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Restrict to exponents `< precision` (never widens the window).
    pub fn truncate_to(&self, precision: i64) -> Self {
        if precision >= self.precision() {
            return self.clone();
        }
        if precision <= self.lead {
            return Self::zero(precision);
        }
        Self::new(
            self.lead,
            self.coeffs[..(precision - self.lead) as usize].to_vec(),
        )
    }

    /// Inverse in `T[[t]][t⁻¹]`, with `terms` coefficients (capped by the
    /// number of known coefficients of `self`).
    pub fn inverse(&self, terms: usize) -> Result<Self, NovringError> {
        let a0 = self.coeffs.first().ok_or(NovringError::NotInvertible)?;
        let inv0 = a0.unit_inverse().ok_or(NovringError::NotInvertible)?;
        let n = terms.min(self.coeffs.len());
        let mut out: Vec<T> = Vec::with_capacity(n);
        for k in 0..n {
            // a0·b_k = [k == 0] − Σ_{j=1..k} a_j b_{k−j}
            let mut acc = if k == 0 { T::one() } else { T::zero() };
            for j in 1..=k {
                acc = acc - self.coeffs[j].clone() * out[k - j].clone();
            }
            out.push(acc * inv0.clone());
        }
        if n == 0 {
            return Ok(Self::zero(-self.lead));
        }
        Ok(Self::new(-self.lead, out))
    }
}

impl<T: Ring> Mul for &LaurentSeries<T> {
    type Output = LaurentSeries<T>;
    fn mul(self, rhs: &LaurentSeries<T>) -> LaurentSeries<T> {
        let lead = self.lead + rhs.lead;
        let n = self.coeffs.len().min(rhs.coeffs.len());
        if n == 0 {
            return LaurentSeries::zero(lead + n as i64);
        }
        let coeffs = (0..n)
            .map(|k| {
                (0..=k).fold(T::zero(), |acc, i| {
                    acc + self.coeffs[i].clone() * rhs.coeffs[k - i].clone()
                })
            })
            .collect();
        LaurentSeries::new(lead, coeffs)
    }
}

impl<T: Ring> Add for &LaurentSeries<T> {
    type Output = LaurentSeries<T>;
    fn add(self, rhs: &LaurentSeries<T>) -> LaurentSeries<T> {
        combine(self, rhs, |a, b| a + b)
    }
}

impl<T: Ring> Sub for &LaurentSeries<T> {
    type Output = LaurentSeries<T>;
    fn sub(self, rhs: &LaurentSeries<T>) -> LaurentSeries<T> {
        combine(self, rhs, |a, b| a - b)
    }
}

impl<T: Ring> Neg for &LaurentSeries<T> {
    type Output = LaurentSeries<T>;
    fn neg(self) -> LaurentSeries<T> {
        LaurentSeries {
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

fn combine<T: Ring>(
    a: &LaurentSeries<T>,
    b: &LaurentSeries<T>,
    op: impl Fn(T, T) -> T,
) -> LaurentSeries<T> {
    let precision = a.precision().min(b.precision());
    let lead = a.lead.min(b.lead).min(precision);
    let coeffs = (lead..precision)
        .map(|e| {
            op(
                a.coeff(e).expect("inside window"),
                b.coeff(e).expect("inside window"),
            )
        })
        .collect::<Vec<_>>();
    if coeffs.iter().all(Zero::is_zero) {
        return LaurentSeries::zero(precision);
    }
    LaurentSeries::new(lead, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn s(lead: i64, c: &[i64]) -> LaurentSeries<BigInt> {
        LaurentSeries::new(lead, c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn difference_of_squares_keeps_window() {
        let prod = &s(0, &[1, 1]) * &s(0, &[1, -1]);
        assert_eq!(prod, s(0, &[1, 0]));
        assert_eq!(prod.truncation(), 2);
        assert_eq!(prod.coeff(2), None);
    }

    #[test]
    fn monomial_identity_and_unit() {
        assert_eq!(&s(-1, &[1]) * &s(1, &[1]), s(0, &[1]));
        assert_eq!(&s(0, &[1, 2, 4]) * &s(0, &[1, 0, 0]), s(0, &[1, 2, 4]));
    }

    #[test]
    fn leading_zeros_are_canonicalized() {
        let a = s(-2, &[0, 0, 3, 1]);
        assert_eq!(a.lead(), 0);
        assert_eq!(a.truncation(), 2);
        assert_eq!(a.coeff(-1), Some(BigInt::from(0)));
        let z = s(0, &[0, 0, 0]);
        assert!(z.is_zero());
        assert_eq!(z.precision(), 3);
    }

    #[test]
    fn inverse_examples() {
        let geo = s(0, &[1, -1, 0, 0, 0, 0]).inverse(6).unwrap();
        assert_eq!(geo, s(0, &[1, 1, 1, 1, 1, 1]));
        assert_eq!(s(1, &[-1]).inverse(1).unwrap(), s(-1, &[-1]));
        assert_eq!(
            s(0, &[2, 1]).inverse(2),
            Err(NovringError::NotInvertible)
        );
        assert_eq!(s(0, &[]).inverse(3), Err(NovringError::NotInvertible));
    }

    #[test]
    fn inverse_is_capped_by_known_window() {
        let inv = s(0, &[1, -1]).inverse(10).unwrap();
        assert_eq!(inv.truncation(), 2);
    }

    #[test]
    fn addition_uses_common_precision() {
        let a = s(-1, &[1, 2, 3]);
        let b = s(0, &[5]);
        let sum = &a + &b;
        assert_eq!(sum, s(-1, &[1, 7]));
        assert!((&a - &a).is_zero());
        assert_eq!((&a - &a).precision(), 2);
    }
}
