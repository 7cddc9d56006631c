//! Incidence series from a transfer endomorphism.
//!
//! Given an endomorphism `A` of `Z^r`, a class `p ∈ Z^r` and a functional
//! `λ: Z^r → Z`, the series `Σ_{k≥0} λ(A^k p) t^k` equals
//! `λ · adj(I − At) · p / det(I − At)`. Both the determinant and the
//! adjugate column are computed by fraction-free (Bareiss) elimination on
//! the polynomial matrix `I − At`. Every leading principal minor of that
//! matrix has constant term 1, so no pivoting is needed and every exact
//! division is by a polynomial whose constant term is a unit.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::novring::json::{bigint_matrix, bigint_vec};
use crate::novring::{IntPoly, IntSeries, LaurentSeries, NovikovRational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("only free abelian groups Z^r are supported; got torsion orders {0:?}")]
    TorsionUnsupported(Vec<String>),
}

/// Square integer matrix acting on `Z^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endomorphism {
    rows: Vec<Vec<BigInt>>,
}

impl Endomorphism {
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self, TransferError> {
        let r = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != r) {
            return Err(TransferError::DimensionMismatch(format!(
                "row {i} has {} entries, expected {r}",
                row.len()
            )));
        }
        Ok(Self { rows })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, TransferError> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn zero(r: usize) -> Self {
        Self {
            rows: vec![vec![BigInt::zero(); r]; r],
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Transfer data for one pair of critical points: `n_k = λ(h^k p)` shifted
/// by `t^{-m}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonodromyData {
    #[serde(with = "bigint_matrix")]
    pub h: Vec<Vec<BigInt>>,
    #[serde(with = "bigint_vec")]
    pub lambda: Vec<BigInt>,
    #[serde(with = "bigint_vec")]
    pub p: Vec<BigInt>,
    #[serde(default)]
    pub m: i64,
    /// Orders of torsion summands of the group; must be absent or empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty", with = "bigint_vec")]
    pub torsion: Vec<BigInt>,
}

impl MonodromyData {
    pub fn endomorphism(&self) -> Result<Endomorphism, TransferError> {
        if !self.torsion.is_empty() {
            return Err(TransferError::TorsionUnsupported(
                self.torsion.iter().map(ToString::to_string).collect(),
            ));
        }
        let a = Endomorphism::new(self.h.clone())?;
        check_dims(&a, &self.lambda, &self.p)?;
        Ok(a)
    }
}

fn check_dims(a: &Endomorphism, lambda: &[BigInt], p: &[BigInt]) -> Result<(), TransferError> {
    let r = a.dim();
    if lambda.len() != r || p.len() != r {
        return Err(TransferError::DimensionMismatch(format!(
            "matrix is {r}×{r}, lambda has {} entries, p has {}",
            lambda.len(),
            p.len()
        )));
    }
    Ok(())
}

/// `det(I − At)` and `adj(I − At) · p`, by Bareiss elimination on `[I − At | p]`.
pub fn resolvent_parts(a: &Endomorphism, p: &[BigInt]) -> (IntPoly, Vec<IntPoly>) {
    let r = a.dim();
    // augmented matrix: r rows, r + 1 columns
    let mut m: Vec<Vec<IntPoly>> = (0..r)
        .map(|i| {
            let mut row: Vec<IntPoly> = (0..r)
                .map(|j| {
                    let diag = if i == j { BigInt::from(1) } else { BigInt::zero() };
                    IntPoly::new(vec![diag, -a.rows[i][j].clone()])
                })
                .collect();
            row.push(IntPoly::constant(p[i].clone()));
            row
        })
        .collect();
    let mut prev = IntPoly::one();
    for k in 0..r {
        for i in k + 1..r {
            for j in k + 1..=r {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num
                    .exact_div_unit_constant(&prev)
                    .expect("Bareiss step divides exactly");
            }
            m[i][k] = IntPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = if r == 0 { IntPoly::one() } else { m[r - 1][r - 1].clone() };
    let mut x = vec![IntPoly::zero(); r];
    for i in (0..r).rev() {
        let mut acc = &det * &m[i][r];
        for j in i + 1..r {
            acc = &acc - &(&m[i][j] * &x[j]);
        }
        x[i] = acc
            .exact_div_unit_constant(&m[i][i])
            .expect("adjugate column is polynomial");
    }
    (det, x)
}

/// `Σ_{k≥0} λ(A^k p) t^k` as `P(t) / Q(t)` with `Q = det(I − At)`, reduced.
pub fn generating_series(
    a: &Endomorphism,
    lambda: &[BigInt],
    p: &[BigInt],
) -> Result<NovikovRational, TransferError> {
    check_dims(a, lambda, p)?;
    let (det, adj_p) = resolvent_parts(a, p);
    let numerator = adj_p
        .iter()
        .zip(lambda)
        .fold(IntPoly::zero(), |acc, (x, l)| &acc + &x.scale(l));
    Ok(NovikovRational::new(numerator, 0, det).expect("det(I - A·0) = 1"))
}

/// Direct evaluation of `λ(A^k p)` for `k < terms` by repeated products.
pub fn brute_force_series(
    a: &Endomorphism,
    lambda: &[BigInt],
    p: &[BigInt],
    terms: usize,
) -> Result<IntSeries, TransferError> {
    check_dims(a, lambda, p)?;
    let mut v = p.to_vec();
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        out.push(lambda.iter().zip(&v).map(|(l, x)| l * x).sum::<BigInt>());
        v = a.apply(&v);
    }
    if out.is_empty() {
        return Ok(LaurentSeries::zero(0));
    }
    Ok(LaurentSeries::new(0, out))
}

/// `t^{-m} · Σ_{k≥0} [y](h^k [x]) t^k` in the form `P / (t^m Q)`.
pub fn incidence_series(d: &MonodromyData) -> Result<NovikovRational, TransferError> {
    let a = d.endomorphism()?;
    let base = generating_series(&a, &d.lambda, &d.p)?;
    Ok(base.times_t_pow(-d.m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::novring::Poly;

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    fn coeffs(s: &IntSeries) -> Vec<i64> {
        s.coeffs()
            .iter()
            .map(|c| num_traits::ToPrimitive::to_i64(c).unwrap())
            .collect()
    }

    #[test]
    fn nilpotent_and_identity() {
        let r = generating_series(&Endomorphism::from_i64(&[&[0]]).unwrap(), &v(&[5]), &v(&[1])).unwrap();
        assert_eq!(r.numerator(), &Poly::from_i64s(&[5]));
        assert_eq!(r.denominator(), &Poly::from_i64s(&[1]));
        let r = generating_series(&Endomorphism::from_i64(&[&[1]]).unwrap(), &v(&[1]), &v(&[1])).unwrap();
        assert_eq!(r.numerator(), &Poly::from_i64s(&[1]));
        assert_eq!(r.denominator(), &Poly::from_i64s(&[1, -1]));
    }

    #[test]
    fn fibonacci_matrix() {
        let a = Endomorphism::from_i64(&[&[1, 1], &[1, 0]]).unwrap();
        let (det, _) = resolvent_parts(&a, &v(&[1, 0]));
        assert_eq!(det, Poly::from_i64s(&[1, -1, -1]));
        let r = generating_series(&a, &v(&[1, 0]), &v(&[1, 0])).unwrap();
        assert_eq!(r.numerator(), &Poly::from_i64s(&[1]));
        assert_eq!(r.denominator(), &Poly::from_i64s(&[1, -1, -1]));
        let bf = brute_force_series(&a, &v(&[1, 0]), &v(&[1, 0]), 8).unwrap();
        assert_eq!(coeffs(&bf), vec![1, 1, 2, 3, 5, 8, 13, 21]);
    }

    #[test]
    fn brute_force_examples() {
        let a = Endomorphism::from_i64(&[&[2]]).unwrap();
        assert_eq!(coeffs(&brute_force_series(&a, &v(&[1]), &v(&[1]), 5).unwrap()), vec![1, 2, 4, 8, 16]);
        let z = Endomorphism::zero(2);
        let s = brute_force_series(&z, &v(&[3, -1]), &v(&[2, 5]), 3).unwrap();
        assert_eq!(s.lead(), 0);
        assert_eq!(coeffs(&s), vec![1, 0, 0]);
    }

    #[test]
    fn incidence_examples() {
        let fib = MonodromyData {
            h: vec![v(&[1, 1]), v(&[1, 0])],
            lambda: v(&[1, 0]),
            p: v(&[1, 0]),
            m: 0,
            torsion: vec![],
        };
        let r = incidence_series(&fib).unwrap();
        assert_eq!(r.denominator(), &Poly::from_i64s(&[1, -1, -1]));
        assert_eq!(r.expand(4).lead(), 0);

        let shifted = MonodromyData {
            h: vec![v(&[1])],
            lambda: v(&[1]),
            p: v(&[1]),
            m: 3,
            torsion: vec![],
        };
        let r = incidence_series(&shifted).unwrap();
        assert_eq!(r.shift(), 3);
        assert_eq!(r.denominator(), &Poly::from_i64s(&[1, -1]));

        let zero = MonodromyData { lambda: v(&[0, 0]), ..fib };
        assert!(incidence_series(&zero).unwrap().is_zero());
    }

    #[test]
    fn interface_errors() {
        let a = Endomorphism::from_i64(&[&[1, 0], &[0, 1]]).unwrap();
        assert!(matches!(
            generating_series(&a, &v(&[1]), &v(&[1, 0])),
            Err(TransferError::DimensionMismatch(_))
        ));
        assert!(Endomorphism::from_i64(&[&[1, 0]]).is_err());
        let d = MonodromyData {
            h: vec![v(&[1])],
            lambda: v(&[1]),
            p: v(&[1]),
            m: 0,
            torsion: v(&[2]),
        };
        assert!(matches!(incidence_series(&d), Err(TransferError::TorsionUnsupported(_))));
    }

    #[test]
    fn json_shape() {
        let d: MonodromyData =
            serde_json::from_str(r#"{"h":[["1","1"],["1","0"]],"lambda":["1","0"],"p":["1","0"],"m":0}"#).unwrap();
        assert_eq!(
            serde_json::to_string(&d).unwrap(),
            r#"{"h":[["1","1"],["1","0"]],"lambda":["1","0"],"p":["1","0"],"m":0}"#
        );
    }

    #[test]
    fn empty_group_gives_zero() {
        let r = generating_series(&Endomorphism::zero(0), &[], &[]).unwrap();
        assert!(r.is_zero());
    }
}
