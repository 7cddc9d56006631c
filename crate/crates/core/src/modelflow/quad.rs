//! Adaptive wrapper around double-exponential quadrature.

/// `∫_a^b f` to absolute tolerance `tol`, bisecting the interval while the
/// reported error estimate is too large.
pub(crate) fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    integrate_rec(f, a, b, tol, 0)
}

fn integrate_rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    if b <= a {
        return 0.0;
    }
    let out = quadrature::integrate(f, a, b, tol);
    if out.error_estimate <= tol || depth >= 24 {
        return out.integral;
    }
    let m = 0.5 * (a + b);
    integrate_rec(f, a, m, 0.5 * tol, depth + 1) + integrate_rec(f, m, b, 0.5 * tol, depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_and_steep() {
        let v = integrate(&|x: f64| x.exp(), 0.0, 1.0, 1e-12);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-12);
        let v = integrate(&|x: f64| 1.0 / (1e-3 + x * x), -1.0, 1.0, 1e-10);
        let exact = 2.0 * (1.0 / 1e-3f64.sqrt()) * (1.0 / 1e-3f64.sqrt()).atan();
        assert!((v - exact).abs() < 1e-8);
    }
}
