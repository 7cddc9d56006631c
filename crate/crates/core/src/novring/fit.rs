//! Exact reconstruction of `P / (t^m Q)` from a finite window of coefficients.
//!
//! For each candidate denominator degree `d = 0, 1, …, max_deg` the
//! recurrence `a_k + q_1 a_{k−1} + … + q_d a_{k−d} = 0` is imposed for every
//! `k` in `max_deg+1 .. K` and solved over the rationals. The first
//! consistent `d` wins; the numerator is read off as the low part of `Q·A`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::Poly;
use super::rational::NovikovRational;
use super::{IntSeries, NovringError};

/// Smallest-degree `P / (t^m Q)` with `deg P, deg Q ≤ max_deg` (after
/// factoring out the leading power of `t`) reproducing every known term.
pub fn fit_rational(s: &IntSeries, max_deg: usize) -> Result<NovikovRational, NovringError> {
    if s.is_zero() {
        return Ok(NovikovRational::zero());
    }
    let needed = 2 * max_deg + 2;
    if s.truncation() < needed {
        return Err(NovringError::InsufficientTerms {
            needed,
            got: s.truncation(),
        });
    }
    let a: Vec<BigRational> = s
        .coeffs()
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    let at = |i: isize| -> BigRational {
        if i < 0 {
            BigRational::zero()
        } else {
            a[i as usize].clone()
        }
    };
    for d in 0..=max_deg {
        let rows: Vec<usize> = (max_deg + 1..a.len()).collect();
        let matrix: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|&k| (1..=d).map(|j| at(k as isize - j as isize)).collect())
            .collect();
        let rhs: Vec<BigRational> = rows.iter().map(|&k| -a[k].clone()).collect();
        let Some(tail) = solve_consistent(matrix, rhs, d) else {
            continue;
        };
        let mut q = vec![BigRational::one()];
        q.extend(tail);
        let q = Poly::new(q);
        let p = (&q * &Poly::new(a.clone())).truncate(max_deg + 1);
        let (p, q) = integralize(&p, &q);
        let r = NovikovRational::new(p, -s.lead(), q).map_err(|_| NovringError::NoFit)?;
        if &r.expand((s.precision() + r.shift() as i64) as usize) != s {
            return Err(NovringError::NoFit);
        }
        return Ok(r);
    }
    Err(NovringError::NoFit)
}

fn integralize(p: &Poly<BigRational>, q: &Poly<BigRational>) -> (Poly<BigInt>, Poly<BigInt>) {
    let lcm = p
        .coeffs()
        .iter()
        .chain(q.coeffs())
        .fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
    let scale = BigRational::from_integer(lcm);
    let to_int = |x: &Poly<BigRational>| x.map(|c| (c * &scale).to_integer());
    (to_int(p), to_int(q))
}

/// Gaussian elimination over `Q`; returns one solution (free variables set
/// to zero) or `None` when the system is inconsistent.
fn solve_consistent(
    mut m: Vec<Vec<BigRational>>,
    mut rhs: Vec<BigRational>,
    cols: usize,
) -> Option<Vec<BigRational>> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        rhs.swap(r, pr);
        let inv = m[r][c].recip();
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        rhs[r] = &rhs[r] * &inv;
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
                let v = &rhs[r] * &f;
                rhs[i] -= v;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if rhs[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rhs[i].clone();
    }
    Some(x)
}
