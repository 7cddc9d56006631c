use serde::Serialize;

use super::field::{norm_diff, FieldSpec};
use super::integrator::{integrate_ivp_with_tolerance, DEFAULT_TOLERANCE};
use super::StabilityError;
use crate::scalar::Real;

/// `ε e^{Dt} + (α/D)(e^{Dt} − 1)`.
pub fn gronwall_bound<F: Real>(eps: F, alpha: F, d: F, t: F) -> F {
    let g = (d * t).exp_m1();
    eps * (g + F::one()) + alpha / d * g
}

#[derive(Debug, Clone, Copy)]
pub struct SeparationOptions {
    pub step: f64,
    pub tolerance: f64,
    /// Grid points per axis for the measured gap α.
    pub grid_per_axis: usize,
    pub grid_max_points: usize,
    /// Multiplier on the summed Richardson estimates.
    pub budget_factor: f64,
}

impl Default for SeparationOptions {
    fn default() -> Self {
        Self {
            step: 1e-2,
            tolerance: DEFAULT_TOLERANCE,
            grid_per_axis: 64,
            grid_max_points: 1_000_000,
            budget_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeparationSample {
    pub t: f64,
    pub separation: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparationReport {
    pub case: String,
    /// Time `t > 0` of smallest `bound − separation`.
    pub t_worst: f64,
    pub separation: f64,
    pub bound: f64,
    pub slack: f64,
    pub budget: f64,
    pub eps: f64,
    pub alpha: f64,
    pub lipschitz: f64,
    pub samples: Vec<SeparationSample>,
}

/// Compare the `u`-trajectory of `x0` with the `w`-trajectory of `y0` on
/// `[0, t_end]` against the Gronwall bound.
pub fn separation_check<F: Real>(
    case: &str,
    u: &FieldSpec<F>,
    w: &FieldSpec<F>,
    x0: &[F],
    y0: &[F],
    t_end: F,
    opts: &SeparationOptions,
) -> Result<SeparationReport, StabilityError> {
    let h = F::lit(opts.step);
    let tol = F::lit(opts.tolerance);
    let gamma = integrate_ivp_with_tolerance(u, x0, t_end, h, tol)?;
    let eta = integrate_ivp_with_tolerance(w, y0, t_end, h, tol)?;
    let alpha = u.sup_gap(w, opts.grid_per_axis, opts.grid_max_points);
    let eps = norm_diff(x0, y0);
    let d = u.lipschitz();
    let budget = F::lit(opts.budget_factor) * (gamma.error_estimate + eta.error_estimate);

    let mut samples = Vec::with_capacity(gamma.times.len());
    let mut worst: Option<SeparationSample> = None;
    for ((&t, a), b) in gamma.times.iter().zip(&gamma.states).zip(&eta.states) {
        let sep = norm_diff(a, b);
        let bound = gronwall_bound(eps, alpha, d, t);
        let s = SeparationSample {
            t: t.as_f64(),
            separation: sep.as_f64(),
            bound: bound.as_f64(),
        };
        if sep > bound + budget {
            return Err(StabilityError::BoundViolated {
                t: s.t,
                separation: s.separation,
                bound: s.bound,
                budget: budget.as_f64(),
            });
        }
        // at t = 0 the bound is met with equality; it says nothing
        let later = t > F::zero() || gamma.times.len() == 1;
        if later && worst.is_none_or(|w| s.bound - s.separation < w.bound - w.separation) {
            worst = Some(s);
        }
        samples.push(s);
    }
    let worst = worst.expect("at least one sample");
    Ok(SeparationReport {
        case: case.to_string(),
        t_worst: worst.t,
        separation: worst.separation,
        bound: worst.bound,
        slack: worst.bound - worst.separation,
        budget: budget.as_f64(),
        eps: eps.as_f64(),
        alpha: alpha.as_f64(),
        lipschitz: d.as_f64(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_formula() {
        assert_eq!(gronwall_bound(0.0, 0.0, 1.0, 5.0), 0.0);
        assert!((gronwall_bound(1.0, 0.0, 1.0, 1.0) - std::f64::consts::E).abs() < 1e-15);
        let (d, t) = (0.7f64, 2.3);
        assert!((gronwall_bound(0.0, d, d, t) - (d * t).exp_m1()).abs() < 1e-14);
    }

    #[test]
    fn linear_pair_attains_bound() {
        let (d, a) = (1.3, 0.2);
        let u = FieldSpec::<f64>::affine_scalar(d, 0.0, 3.0);
        let w = FieldSpec::<f64>::affine_scalar(d, a, 3.0);
        let rep = separation_check("linear", &u, &w, &[0.5], &[0.5], 3.0, &SeparationOptions::default()).unwrap();
        assert!((rep.alpha - a).abs() < 1e-15);
        for s in &rep.samples {
            assert!((s.separation - s.bound).abs() <= 1e-6 * s.bound.max(1e-300), "{s:?}");
        }
    }

    #[test]
    fn identical_and_offset() {
        let u = FieldSpec::<f64>::affine_scalar(0.8, 0.0, 2.0);
        let rep = separation_check("same", &u, &u, &[0.1], &[0.1], 2.0, &Default::default()).unwrap();
        assert!(rep.samples.iter().all(|s| s.separation == 0.0));
        let rep = separation_check("offset", &u, &u, &[0.1], &[0.15], 2.0, &Default::default()).unwrap();
        for s in &rep.samples {
            assert!((s.separation - s.bound).abs() <= 1e-9 * s.bound);
        }
    }

    #[test]
    fn understated_lipschitz_is_flagged() {
        let u = FieldSpec::<f64>::new(1, 0.2, 2.0, |x, o| o[0] = 1.5 * x[0]);
        let err = separation_check("lie", &u, &u, &[0.1], &[0.2], 3.0, &Default::default()).unwrap_err();
        assert!(matches!(err, StabilityError::BoundViolated { .. }));
    }
}
