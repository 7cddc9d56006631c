//! Rational functions `P(t) / (t^m Q(t))` over the integers with `Q(0) = 1`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::poly::Poly;
use super::series::LaurentSeries;
use super::{IntPoly, IntSeries, NovringError};

/// `P(t) / (t^m Q(t))` in canonical form: `Q(0) = 1`, `gcd(P, Q) = 1`
/// over `Q[t]`, and `m` minimal (`P(0) ≠ 0` whenever `m > 0`).
/// The zero function is `0 / 1` with `m = 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NovikovRational {
    numerator: IntPoly,
    shift: u32,
    denominator: IntPoly,
}

impl NovikovRational {
    /// Canonicalize `P / (t^m Q)`. A negative `m` multiplies `P` by `t^{-m}`.
    ///
    /// Fails when `Q(0) = 0` or when the reduced fraction cannot be written
    /// with integer coefficients and `Q(0) = 1`.
    pub fn new(numerator: IntPoly, shift: i64, denominator: IntPoly) -> Result<Self, NovringError> {
        let q0 = denominator.coeff(0);
        if q0.is_zero() {
            return Err(NovringError::InvalidDenominator);
        }
        if numerator.is_zero() {
            return Ok(Self::zero());
        }
        let (mut p, mut m) = if shift < 0 {
            (numerator.shift_up(shift.unsigned_abs() as usize), 0u32)
        } else {
            (numerator, shift as u32)
        };
        // strip common powers of t between P and t^m
        if m > 0 {
            let v = p.valuation().unwrap_or(0).min(m as usize);
            p = p.shift_down(v);
            m -= v as u32;
        }
        let pr = p.to_rational();
        let qr = denominator.to_rational();
        let g = pr.gcd(&qr);
        let (mut pr, mut qr) = if g.degree().unwrap_or(0) > 0 {
            (pr.div_rem(&g).0, qr.div_rem(&g).0)
        } else {
            (pr, qr)
        };
        let norm = qr.coeff(0).recip();
        pr = pr.scale(&norm);
        qr = qr.scale(&norm);
        let to_int = |r: &Poly<BigRational>| -> Option<IntPoly> {
            r.coeffs()
                .iter()
                .map(|c| c.is_integer().then(|| c.to_integer()))
                .collect::<Option<Vec<_>>>()
                .map(Poly::new)
        };
        match (to_int(&pr), to_int(&qr)) {
            (Some(numerator), Some(denominator)) => Ok(Self {
                numerator,
                shift: m,
                denominator,
            }),
            _ => Err(NovringError::InvalidDenominator),
        }
    }

    pub fn zero() -> Self {
        Self {
            numerator: Poly::zero(),
            shift: 0,
            denominator: Poly::one(),
        }
    }

    /// A Laurent polynomial `t^lead · p` (denominator 1).
    pub fn laurent_polynomial(p: IntPoly, lead: i64) -> Self {
        Self::new(p, -lead, Poly::one()).expect("denominator 1 is canonical")
    }

    pub fn numerator(&self) -> &IntPoly {
        &self.numerator
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn denominator(&self) -> &IntPoly {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Multiply by `t^k`.
    pub fn times_t_pow(&self, k: i64) -> Self {
        Self::new(
            self.numerator.clone(),
            self.shift as i64 - k,
            self.denominator.clone(),
        )
        .expect("already canonical")
    }

    /// The first `terms` coefficients of the expansion at 0, starting at
    /// `t^{-m}`. Computed with the recurrence `Σ_j q_j a_{k−j} = p_k`.
    pub fn expand(&self, terms: usize) -> IntSeries {
        let lead = -(self.shift as i64);
        if self.is_zero() {
            return LaurentSeries::zero(lead + terms as i64);
        }
        let q = self.denominator.coeffs();
        let mut a: Vec<BigInt> = Vec::with_capacity(terms);
        for k in 0..terms {
            let mut acc = self.numerator.coeff(k);
            for j in 1..q.len().min(k + 1) {
                acc -= &q[j] * &a[k - j];
            }
            a.push(acc);
        }
        LaurentSeries::new(lead, a)
    }

    /// Exponential growth rate `σ = 1/ρ`, `ρ` the smallest modulus of a
    /// root of `Q`. Zero for polynomial numerators over `Q = 1`.
    pub fn growth_rate(&self) -> f64 {
        super::growth::growth_estimate(self)
    }

    /// Upper bound `C · max(σ,1)^k · (k+1)^{deg Q}` on `|a_{k−m}|`, with
    /// `C = Σ|p_i| · (Σ|q_i|)^{deg Q}`.
    pub fn coefficient_bound(&self, k: usize) -> f64 {
        let dq = self.denominator.degree().unwrap_or(0) as i32;
        let l1 = |p: &IntPoly| -> f64 {
            num_traits::ToPrimitive::to_f64(&p.l1_norm()).unwrap_or(f64::INFINITY)
        };
        let c = l1(&self.numerator) * l1(&self.denominator).powi(dq);
        let sigma = self.growth_rate().max(1.0);
        c * sigma.powi(k as i32) * ((k + 1) as f64).powi(dq)
    }
}

impl fmt::Display for NovikovRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.shift {
            0 => write!(f, "({}) / ({})", self.numerator, self.denominator),
            m => write!(f, "({}) / (t^{m} · ({}))", self.numerator, self.denominator),
        }
    }
}
