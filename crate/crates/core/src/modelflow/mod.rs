//! The standard saddle `v₀(x, y) = (x, −y)` on `Rᵏ × R^{n−k}`, whose
//! trajectories are `(x₀eᵗ, y₀e⁻ᵗ)`, and bounds on how long they linger in
//! annuli and in the lens `{|f₀| ≤ r²} \ B(0, r)`, `f₀ = −|x|² + |y|²`.
//!
//! All crossing times are found by bisection on the monotone branches of
//! `|γ(t)|² = |x₀|²e^{2t} + |y₀|²e^{−2t}`; arc lengths and rescaled times
//! use adaptive double-exponential quadrature.

mod aconstruction;
mod branch;
mod quad;
pub mod sweep;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Real;
use branch::{bisect_increasing, branches};

pub use aconstruction::{
    a_field, a_field_residence, a_lambda_profile, choose_delta, smooth_step, theta, AConstructionParams,
    AResidence, Cutoff,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelFlowError {
    #[error("trajectory does not meet the region")]
    NoIntersection,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// A point `(x, y)` with `x` in the unstable and `y` in the stable factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelPoint<F> {
    pub x: Vec<F>,
    pub y: Vec<F>,
}

impl<F: Real> ModelPoint<F> {
    pub fn new(x: Vec<F>, y: Vec<F>) -> Self {
        Self { x, y }
    }

    /// Splits `z` after the first `k` coordinates.
    pub fn from_coords(z: &[F], k: usize) -> Self {
        Self::new(z[..k].to_vec(), z[k..].to_vec())
    }

    pub fn coords(&self) -> Vec<F> {
        self.x.iter().chain(&self.y).copied().collect()
    }

    pub fn dim(&self) -> usize {
        self.x.len() + self.y.len()
    }

    pub fn index(&self) -> usize {
        self.x.len()
    }

    pub fn x_norm_sq(&self) -> F {
        sum_sq(&self.x)
    }

    pub fn y_norm_sq(&self) -> F {
        sum_sq(&self.y)
    }

    pub fn norm(&self) -> F {
        (self.x_norm_sq() + self.y_norm_sq()).sqrt()
    }

    /// `f₀ = −|x|² + |y|²`.
    pub fn f0(&self) -> F {
        self.y_norm_sq() - self.x_norm_sq()
    }
}

fn sum_sq<F: Real>(v: &[F]) -> F {
    v.iter().fold(F::zero(), |s, &c| s + c * c)
}

/// `(x₀eᵗ, y₀e⁻ᵗ)`.
pub fn model_trajectory<F: Real>(z0: &ModelPoint<F>, t: F) -> ModelPoint<F> {
    let (e, f) = (t.exp(), (-t).exp());
    ModelPoint {
        x: z0.x.iter().map(|&c| c * e).collect(),
        y: z0.y.iter().map(|&c| c * f).collect(),
    }
}

/// The closed annulus `r ≤ |z| ≤ R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusSpec<F> {
    pub outer: F,
    pub inner: F,
}

impl<F: Real> AnnulusSpec<F> {
    pub fn new(outer: F, inner: F) -> Result<Self, ModelFlowError> {
        if !(outer > inner && inner > F::zero()) {
            return Err(ModelFlowError::InvalidParams(format!(
                "need R > r > 0, got R = {outer:?}, r = {inner:?}"
            )));
        }
        Ok(Self { outer, inner })
    }

    /// `LLN(R/r)`, the bound on the time any trajectory spends inside.
    pub fn time_bound(&self) -> F {
        lln(self.outer / self.inner)
    }

    pub fn length_bound(&self) -> F {
        self.outer + self.outer
    }
}

/// `ln(x² + √(x⁴ − 1))`, for `x ≥ 1`.
pub fn lln<F: Real>(x: F) -> F {
    let x2 = x * x;
    (x2 + (x2 * x2 - F::one()).sqrt()).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusResidence<F> {
    pub time: F,
    pub length: F,
    pub time_bound: F,
    pub length_bound: F,
}

impl<F: Real> AnnulusResidence<F> {
    pub fn within_bounds(&self) -> bool {
        self.time <= self.time_bound && self.length <= self.length_bound
    }
}

/// Time and arc length the trajectory through `z0` spends in the annulus,
/// over all of `t ∈ R`.
pub fn annulus_residence<F: Real>(
    z0: &ModelPoint<F>,
    spec: &AnnulusSpec<F>,
) -> Result<AnnulusResidence<F>, ModelFlowError> {
    let (a, b) = (z0.x_norm_sq(), z0.y_norm_sq());
    let (lo, hi) = (spec.inner * spec.inner, spec.outer * spec.outer);
    let mut time = F::zero();
    let mut length = 0.0f64;
    let mut hit = false;
    for br in branches(a, b) {
        if let Some((s1, s2)) = br.shell(lo, hi) {
            hit = true;
            time = time + (s2 - s1);
            let q = |s: f64| {
                let e = (2.0 * s).exp();
                (br.a.as_f64() * e + br.b.as_f64() / e).sqrt()
            };
            length += quad::integrate(&q, s1.as_f64(), s2.as_f64(), 1e-11);
        }
    }
    if !hit {
        return Err(ModelFlowError::NoIntersection);
    }
    Ok(AnnulusResidence {
        time,
        length: F::lit(length),
        time_bound: spec.time_bound(),
        length_bound: spec.length_bound(),
    })
}

/// Measure of `{t : |f₀(γ(t))| ≤ r², |γ(t)| ≥ r}`.
pub fn lens_residence<F: Real>(z0: &ModelPoint<F>, r: F) -> Result<F, ModelFlowError> {
    if !(r > F::zero()) {
        return Err(ModelFlowError::InvalidParams(format!("need r > 0, got {r:?}")));
    }
    let (a, b) = (z0.x_norm_sq(), z0.y_norm_sq());
    let r2 = r * r;
    if a == F::zero() && b == F::zero() {
        return Err(ModelFlowError::NoIntersection);
    }
    if a == F::zero() || b == F::zero() {
        // On an axis |f₀| = |γ|², so the set is the single time |γ| = r.
        return Ok(F::zero());
    }
    // f₀ is strictly decreasing in t; solve f₀ = r² and f₀ = −r².
    let f0 = |t: F| {
        let e = (t + t).exp();
        b / e - a * e
    };
    let level = |c: F| {
        let (mut lo, mut hi) = (-F::one(), F::one());
        while f0(lo) < c {
            lo = lo + lo;
        }
        while f0(hi) > c {
            hi = hi + hi;
        }
        bisect_increasing(|t| c - f0(t), lo, hi)
    };
    let (t1, t2) = (level(r2), level(-r2));
    // the hole {|γ| < r} is the open interval between the two r-crossings
    let hole = {
        let brs = branches(a, b);
        let tstar = F::lit(0.25) * (b / a).ln();
        if brs[0].q(tstar) >= r2 {
            None
        } else {
            Some((-brs[1].root(r2), brs[0].root(r2)))
        }
    };
    let mut time = t2 - t1;
    if let Some((u1, u2)) = hole {
        if t1 > u1 && t2 < u2 {
            return Err(ModelFlowError::NoIntersection);
        }
        let overlap = (t2.min(u2) - t1.max(u1)).max(F::zero());
        time = time - overlap;
    }
    Ok(time.max(F::zero()))
}

/// `β + 8N`: the quickness constant after halving a `(C, β, α)`-quick field
/// with `N` critical points, each costing at most `ln(4 + √15) ≤ 8`.
pub fn quickness_halving<F: Real>(n: u64, beta: F) -> F {
    let per_annulus = lln(F::lit(2.0));
    assert!(per_annulus <= F::lit(8.0), "ln(4 + sqrt 15) = {per_annulus:?} exceeds 8");
    beta + F::lit(8.0 * n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2};

    fn p(x: &[f64], y: &[f64]) -> ModelPoint<f64> {
        ModelPoint::new(x.to_vec(), y.to_vec())
    }

    #[test]
    fn trajectory_examples() {
        assert_eq!(model_trajectory(&p(&[0.0], &[0.0]), 3.0), p(&[0.0], &[0.0]));
        let z = model_trajectory(&p(&[1.0, 0.0], &[0.0]), LN_2);
        assert!((z.x[0] - 2.0).abs() < 1e-15 && z.x[1] == 0.0 && z.y[0] == 0.0);
        let z = model_trajectory(&p(&[1.0], &[1.0]), 1.0);
        assert!((z.x[0] - E).abs() < 1e-15 && (z.y[0] - 1.0 / E).abs() < 1e-15);
        assert!(z.f0() < p(&[1.0], &[1.0]).f0());
    }

    #[test]
    fn radial_annulus_times() {
        let spec = AnnulusSpec::new(2.0, 1.0).unwrap();
        let res = annulus_residence(&p(&[1.0], &[]), &spec).unwrap();
        assert!((res.time - LN_2).abs() < 1e-11);
        assert!((res.length - 1.0).abs() < 1e-9);
        assert!((spec.time_bound() - (4.0 + 15f64.sqrt()).ln()).abs() < 1e-15);
        let res = annulus_residence(&p(&[0.0, 0.0], &[2.0]), &spec).unwrap();
        assert!((res.time - LN_2).abs() < 1e-11);
        assert!(res.within_bounds());
    }

    #[test]
    fn tangent_trajectory_attains_time_bound() {
        // min |γ|² = 2|x0||y0| = r² at t = 0 for x0 = y0 = r/√2
        let r = 0.7;
        let spec = AnnulusSpec::new(2.0 * r, r).unwrap();
        let c = r / 2f64.sqrt();
        let res = annulus_residence(&p(&[c], &[c]), &spec).unwrap();
        // q - r² is quadratic at the tangency, so 1e-16 in q is ~1e-8 in t
        assert!((res.time - spec.time_bound()).abs() < 1e-7, "{res:?}");
        assert!(res.time <= spec.time_bound() + 1e-12);
        assert!(res.length <= res.length_bound);
    }

    #[test]
    fn annulus_no_intersection() {
        let spec = AnnulusSpec::new(2.0, 1.0).unwrap();
        assert_eq!(annulus_residence(&p(&[0.0], &[0.0]), &spec), Err(ModelFlowError::NoIntersection));
        assert_eq!(annulus_residence(&p(&[3.0], &[3.0]), &spec), Err(ModelFlowError::NoIntersection));
        assert!(AnnulusSpec::new(1.0, 1.0).is_err());
    }

    #[test]
    fn lens_examples() {
        let t = lens_residence(&p(&[0.75], &[0.75]), 1.0).unwrap();
        assert!(t > 0.0 && t <= 2.0);
        assert_eq!(lens_residence(&p(&[1.0], &[]), 1.0).unwrap(), 0.0);
        let t = lens_residence(&p(&[1e6], &[1.0]), 1.0).unwrap();
        assert!(t < 1e-5);
        assert_eq!(lens_residence(&p(&[0.0], &[0.0]), 1.0), Err(ModelFlowError::NoIntersection));
    }

    #[test]
    fn lens_time_matches_closed_form() {
        // with a, b > 0 and no hole, the time is ½ln(u2/u1) for the roots of a u² ± r² u − b = 0
        let (x, y, r) = (0.9f64, 1.3f64, 0.5f64);
        let (a, b, r2) = (x * x, y * y, r * r);
        let u = |c: f64| (-c + (c * c + 4.0 * a * b).sqrt()) / (2.0 * a);
        let exact = 0.5 * (u(-r2) / u(r2)).ln();
        assert!((lens_residence(&p(&[x], &[y]), r).unwrap() - exact).abs() < 1e-11);
    }

    #[test]
    fn quickness() {
        assert_eq!(quickness_halving(0, 3.0), 3.0);
        assert_eq!(quickness_halving(1, 0.0), 8.0);
        assert_eq!(quickness_halving(5, 1.0), 41.0);
        assert!((lln(2.0f64) - 2.0634).abs() < 1e-4);
    }

    #[test]
    fn single_precision_annulus() {
        let spec = AnnulusSpec::new(2.0f32, 1.0).unwrap();
        let res = annulus_residence(&ModelPoint::new(vec![1.0f32], vec![]), &spec).unwrap();
        assert!((res.time - std::f32::consts::LN_2).abs() < 1e-5);
    }
}
