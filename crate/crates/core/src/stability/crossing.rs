use super::field::FieldSpec;
use super::integrator::{flow_point, Rk4};
use super::StabilityError;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingResult<F> {
    pub tau0: F,
    pub point: Vec<F>,
    pub bracket: (F, F),
}

/// The unique `τ₀ ∈ [lo, hi]` with `g(γ(x0, τ₀; w)) = 0`.
///
/// `g ∘ γ` is sampled on the step grid and must be strictly monotone there;
/// the root is then bisected using partial RK4 steps from the grid point on
/// the left.
pub fn crossing_time<F: Real>(
    w: &FieldSpec<F>,
    x0: &[F],
    g: impl Fn(&[F]) -> F,
    window: (F, F),
    h: F,
) -> Result<CrossingResult<F>, StabilityError> {
    let (lo, hi) = window;
    if !(hi > lo) || !(h > F::zero()) {
        return Err(StabilityError::InvalidArgument(format!(
            "need lo < hi and h > 0, got window {window:?}, h = {h:?}"
        )));
    }
    let steps = ((hi - lo) / h).ceil().to_usize().unwrap_or(1).max(2);
    let dt = (hi - lo) / F::lit(steps as f64);
    let mut rk = Rk4::new(w.dim());
    let f = |z: &[F], o: &mut [F]| w.eval_into(z, o);

    let mut states = Vec::with_capacity(steps + 1);
    let mut x = flow_point(w, x0, lo, h);
    states.push(x.clone());
    for _ in 0..steps {
        rk.step(f, &mut x, dt);
        states.push(x.clone());
    }
    let vals: Vec<F> = states.iter().map(|s| g(s)).collect();
    let time = |i: usize| lo + dt * F::lit(i as f64);

    if vals[0] * vals[steps] > F::zero() {
        return Err(StabilityError::NoSignChange);
    }
    let dir = (vals[steps] - vals[0]).signum();
    for i in 0..steps {
        if (vals[i + 1] - vals[i]) * dir <= F::zero() {
            return Err(StabilityError::MultipleCrossings { t: time(i).as_f64() });
        }
    }
    let i = (0..steps)
        .find(|&i| vals[i] * vals[i + 1] <= F::zero())
        .expect("sign change between the ends");

    let eval_at = |s: F, rk: &mut Rk4<F>| {
        let mut y = states[i].clone();
        if s > F::zero() {
            rk.step(f, &mut y, s);
        }
        y
    };
    let (mut a, mut b) = (F::zero(), dt);
    let mut ga = vals[i];
    let mut best = (F::zero(), states[i].clone(), vals[i]);
    for _ in 0..200 {
        let m = (a + b) * F::lit(0.5);
        if m <= a || m >= b {
            break;
        }
        let y = eval_at(m, &mut rk);
        let gm = g(&y);
        if gm.abs() < best.2.abs() || best.2 != F::zero() && gm == F::zero() {
            best = (m, y, gm);
        }
        if gm == F::zero() {
            break;
        }
        if ga * gm < F::zero() {
            b = m;
        } else {
            a = m;
            ga = gm;
        }
    }
    if vals[i + 1].abs() < best.2.abs() {
        best = (dt, states[i + 1].clone(), vals[i + 1]);
    }
    let (s, point, _) = best;
    Ok(CrossingResult {
        tau0: time(i) + s,
        point,
        bracket: (time(i) + a, time(i) + b),
    })
}
