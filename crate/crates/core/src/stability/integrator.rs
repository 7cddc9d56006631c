use super::field::{norm_diff, FieldSpec};
use super::StabilityError;
use crate::scalar::Real;

/// Reusable buffers for classical fourth-order Runge–Kutta steps on an
/// autonomous field.
#[derive(Debug, Clone)]
pub struct Rk4<F> {
    k1: Vec<F>,
    k2: Vec<F>,
    k3: Vec<F>,
    k4: Vec<F>,
    tmp: Vec<F>,
}

impl<F: Real> Rk4<F> {
    pub fn new(dim: usize) -> Self {
        let z = vec![F::zero(); dim];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    /// Advance `x` in place by one step of size `h` (which may be negative).
    pub fn step(&mut self, field: impl Fn(&[F], &mut [F]), x: &mut [F], h: F) {
        let half = h * F::lit(0.5);
        let n = x.len();
        field(x, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = x[i] + half * self.k1[i];
        }
        field(&self.tmp, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = x[i] + half * self.k2[i];
        }
        field(&self.tmp, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = x[i] + h * self.k3[i];
        }
        field(&self.tmp, &mut self.k4);
        let sixth = h / F::lit(6.0);
        for i in 0..n {
            x[i] = x[i]
                + sixth * (self.k1[i] + F::lit(2.0) * (self.k2[i] + self.k3[i]) + self.k4[i]);
        }
    }
}

/// A sampled trajectory of an autonomous field.
///
/// `states[i]` is the solution at `times[i]` computed with step `step / 2`;
/// `error_estimate` is the Richardson estimate `max |x_h − x_{h/2}| / 15` of
/// its global error on the grid.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord<F> {
    pub times: Vec<F>,
    pub states: Vec<Vec<F>>,
    pub step: F,
    pub integrator_order: u32,
    pub error_estimate: F,
}

impl<F: Real> TrajectoryRecord<F> {
    pub fn last(&self) -> &[F] {
        self.states.last().expect("nonempty record")
    }

    /// State at any `t` in the recorded range: one partial RK4 step (at the
    /// refined step) from the nearest grid point to the left.
    pub fn state_at(&self, field: &FieldSpec<F>, t: F) -> Vec<F> {
        let i = self.times.iter().rposition(|&ti| ti <= t).unwrap_or_default();
        let mut x = self.states[i].clone();
        let mut rk = Rk4::new(x.len());
        let fine = self.step * F::lit(0.5);
        let mut s = self.times[i];
        while (t - s).abs() > F::epsilon() * (F::one() + t.abs()) {
            let h = if (t - s).abs() > fine { fine.copysign(t - s) } else { t - s };
            rk.step(|z: &[F], o: &mut [F]| field.eval_into(z, o), &mut x, h);
            s = s + h;
        }
        x
    }
}

/// Default tolerance on the Richardson estimate before `StepTooLarge`.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Integrate `x' = v(x)` on `[0, t_end]` with fixed steps of (at most) `h`.
pub fn integrate_ivp<F: Real>(
    v: &FieldSpec<F>,
    x0: &[F],
    t_end: F,
    h: F,
) -> Result<TrajectoryRecord<F>, StabilityError> {
    integrate_ivp_with_tolerance(v, x0, t_end, h, F::lit(DEFAULT_TOLERANCE))
}

pub fn integrate_ivp_with_tolerance<F: Real>(
    v: &FieldSpec<F>,
    x0: &[F],
    t_end: F,
    h: F,
    tolerance: F,
) -> Result<TrajectoryRecord<F>, StabilityError> {
    if !(t_end >= F::zero()) || !(h > F::zero()) {
        return Err(StabilityError::InvalidArgument(format!(
            "need t_end >= 0 and h > 0, got t_end = {t_end:?}, h = {h:?}"
        )));
    }
    assert_eq!(x0.len(), v.dim(), "initial point has wrong dimension");
    let steps = (t_end / h).ceil().to_usize().unwrap_or(0).max(1);
    let h_eff = if t_end > F::zero() { t_end / F::lit(steps as f64) } else { F::zero() };
    let half = h_eff * F::lit(0.5);
    let f = |z: &[F], o: &mut [F]| v.eval_into(z, o);
    let mut rk = Rk4::new(v.dim());
    let mut coarse = x0.to_vec();
    let mut fine = x0.to_vec();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut err = F::zero();
    times.push(F::zero());
    states.push(fine.clone());
    if t_end > F::zero() {
        for i in 1..=steps {
            rk.step(f, &mut coarse, h_eff);
            rk.step(f, &mut fine, half);
            rk.step(f, &mut fine, half);
            err = err.max(norm_diff(&coarse, &fine) / F::lit(15.0));
            times.push(h_eff * F::lit(i as f64));
            states.push(fine.clone());
        }
    }
    if !(err <= tolerance) {
        return Err(StabilityError::StepTooLarge {
            estimate: err.as_f64(),
            tolerance: tolerance.as_f64(),
        });
    }
    Ok(TrajectoryRecord {
        times,
        states,
        step: h_eff,
        integrator_order: 4,
        error_estimate: err,
    })
}

/// `γ(x0, t; v)` for any sign of `t`, by fixed RK4 steps of at most `h`.
pub fn flow_point<F: Real>(v: &FieldSpec<F>, x0: &[F], t: F, h: F) -> Vec<F> {
    let mut x = x0.to_vec();
    if t == F::zero() {
        return x;
    }
    let steps = (t.abs() / h).ceil().to_usize().unwrap_or(1).max(1);
    let dt = t / F::lit(steps as f64);
    let mut rk = Rk4::new(v.dim());
    for _ in 0..steps {
        rk.step(|z: &[F], o: &mut [F]| v.eval_into(z, o), &mut x, dt);
    }
    x
}
