//! Exponential growth rate of an expanded rational function.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::rational::NovikovRational;

const POLISH_STEPS: usize = 8;
const POLISH_RESIDUAL: f64 = 1e-9;

/// `σ = 1/ρ` where `ρ` is the smallest modulus of a complex root of `Q`.
///
/// With `Q(0) = 1` the reversed polynomial `t^d Q(1/t)` is monic, and its
/// roots are the reciprocals of the roots of `Q`; `σ` is their largest
/// modulus. Roots come from the companion matrix and are polished with a
/// few Newton steps.
pub fn growth_estimate(r: &NovikovRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let q: Vec<f64> = r
        .denominator()
        .coeffs()
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
        .collect();
    let d = q.len() - 1;
    if d == 0 {
        return 0.0;
    }
    // reversed monic polynomial: z^d + q1 z^{d-1} + ... + qd
    let companion = DMatrix::from_fn(d, d, |i, j| {
        if i == 0 {
            -q[j + 1]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion
        .complex_eigenvalues()
        .iter()
        .map(|&z| polish(&q, z).norm())
        .fold(0.0, f64::max)
}

fn polish(q: &[f64], mut z: Complex64) -> Complex64 {
    // evaluate z^d + q1 z^{d-1} + ... + qd and its derivative by Horner
    let eval = |z: Complex64| {
        let mut p = Complex64::new(1.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in &q[1..] {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    for _ in 0..POLISH_STEPS {
        let (p, dp) = eval(z);
        if p.norm() <= POLISH_RESIDUAL * (1.0 + z.norm()) || dp.norm() == 0.0 {
            break;
        }
        z -= p / dp;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::novring::IntPoly;

    fn rat(q: &[i64]) -> NovikovRational {
        NovikovRational::new(IntPoly::from_i64s(&[1]), 0, IntPoly::from_i64s(q)).unwrap()
    }

    #[test]
    fn examples() {
        assert!((growth_estimate(&rat(&[1, -2])) - 2.0).abs() < 1e-9);
        assert_eq!(growth_estimate(&rat(&[1])), 0.0);
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((growth_estimate(&rat(&[1, -1, -1])) - golden).abs() < 1e-9);
    }

    #[test]
    fn complex_roots() {
        // 1 + t^2 has roots ±i
        assert!((growth_estimate(&rat(&[1, 0, 1])) - 1.0).abs() < 1e-9);
        // (1 - 3t)(1 + t + t^2)
        assert!((growth_estimate(&rat(&[1, -2, -2, -3])) - 3.0).abs() < 1e-9);
    }
}
