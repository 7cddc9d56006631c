//! Radial rescaling `v₁(z) = λ(|z|) v₀(z)` that makes a chart cheap to
//! cross: `λ = 1` near the center, `λ = B/(Dt)` on the middle band (so the
//! euclidean speed there is exactly `B/D`, because `|v₀(z)| = |z|`), and
//! `λ = Γ` near the boundary sphere.

use serde::{Deserialize, Serialize};

use super::branch::branches;
use super::{lln, quad, ModelFlowError, ModelPoint};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    /// `θ` built from `e^{−1/u}` transitions on the two collars.
    Mollifier,
    /// `θ ≡ 0`: no rescaling at all (requires `Γ = 1`).
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AConstructionParams<F> {
    pub r: F,
    pub mu: F,
    pub delta: F,
    pub gamma: F,
    /// `‖v‖`.
    pub b: F,
    /// `𝒢(𝒱)`.
    pub d: F,
    pub cutoff: Cutoff,
}

impl<F: Real> AConstructionParams<F> {
    pub fn new(r: F, mu: F, delta: F, gamma: F, b: F, d: F, cutoff: Cutoff) -> Result<Self, ModelFlowError> {
        let p = Self { r, mu, delta, gamma, b, d, cutoff };
        p.validate()?;
        Ok(p)
    }

    /// Same, with `δ` from [`choose_delta`].
    pub fn with_chosen_delta(r: F, mu: F, gamma: F, b: F, d: F) -> Result<Self, ModelFlowError> {
        let delta = choose_delta(r, mu, b, d)?;
        Self::new(r, mu, delta, gamma, b, d, Cutoff::Mollifier)
    }

    pub fn validate(&self) -> Result<(), ModelFlowError> {
        let bad = |m: String| Err(ModelFlowError::InvalidParams(m));
        let Self { r, mu, delta, gamma, b, d, .. } = *self;
        if !(mu > F::zero() && mu < r) {
            return bad(format!("need 0 < mu < r, got mu = {mu:?}, r = {r:?}"));
        }
        if !(delta > F::zero() && delta + delta < r - mu) {
            return bad(format!("need 0 < delta < (r - mu)/2, got delta = {delta:?}"));
        }
        if !(b > F::zero()) || !(d >= F::one()) {
            return bad(format!("need B > 0 and D >= 1, got B = {b:?}, D = {d:?}"));
        }
        match self.cutoff {
            Cutoff::Off if gamma != F::one() => bad(format!("cutoff off requires Gamma = 1, got {gamma:?}")),
            Cutoff::Mollifier if !(gamma >= F::one()) => bad(format!("need Gamma >= 1, got {gamma:?}")),
            Cutoff::Mollifier if !(collar_margin(r, mu, delta, b, d) > F::zero()) => bad(format!(
                "collar condition fails: LLN(r/(r-delta)) = {:?}, LLN((mu+delta)/mu) = {:?}, cap = {:?}",
                lln(r / (r - delta)),
                lln((mu + delta) / mu),
                collar_cap(r, b, d)
            )),
            _ => Ok(()),
        }
    }

    /// Bound on the time a `v₁`-trajectory spends in `μ ≤ |z| ≤ r`:
    /// `3Dr/B`, or the plain annulus bound `LLN(r/μ)` without rescaling.
    pub fn residence_bound(&self) -> F {
        match self.cutoff {
            Cutoff::Mollifier => F::lit(3.0) * self.d * self.r / self.b,
            Cutoff::Off => lln(self.r / self.mu),
        }
    }
}

fn collar_cap<F: Real>(r: F, b: F, d: F) -> F {
    (d * r / (b + b)).min(F::lit(0.5))
}

fn collar_margin<F: Real>(r: F, mu: F, delta: F, b: F, d: F) -> F {
    collar_cap(r, b, d) - lln(r / (r - delta)).max(lln((mu + delta) / mu))
}

/// Half of the largest `δ < (r − μ)/2` satisfying the collar condition.
pub fn choose_delta<F: Real>(r: F, mu: F, b: F, d: F) -> Result<F, ModelFlowError> {
    if !(mu > F::zero() && mu < r && b > F::zero() && d > F::zero()) {
        return Err(ModelFlowError::InvalidParams(format!(
            "need 0 < mu < r and B, D > 0, got r = {r:?}, mu = {mu:?}, B = {b:?}, D = {d:?}"
        )));
    }
    let cap = (r - mu) * F::lit(0.5);
    let ok = |delta: F| collar_margin(r, mu, delta, b, d) > F::zero();
    let (mut lo, mut hi) = (F::zero(), cap);
    for _ in 0..200 {
        let m = (lo + hi) * F::lit(0.5);
        if m <= lo || m >= hi {
            break;
        }
        if ok(m) {
            lo = m;
        } else {
            hi = m;
        }
    }
    if !(lo > F::zero()) {
        return Err(ModelFlowError::InvalidParams("no admissible delta".into()));
    }
    Ok(lo * F::lit(0.5))
}

/// `0` for `u ≤ 0`, `1` for `u ≥ 1`, smooth in between.
pub fn smooth_step<F: Real>(u: F) -> F {
    if u <= F::zero() {
        return F::zero();
    }
    if u >= F::one() {
        return F::one();
    }
    let s = |v: F| (-v.recip()).exp();
    let (a, b) = (s(u), s(F::one() - u));
    a / (a + b)
}

/// Cutoff supported in `]μ, r[` and equal to 1 on `[μ + δ, r − δ]`.
pub fn theta<F: Real>(p: &AConstructionParams<F>, t: F) -> F {
    match p.cutoff {
        Cutoff::Off => F::zero(),
        Cutoff::Mollifier => smooth_step((t - p.mu) / p.delta) * smooth_step((p.r - t) / p.delta),
    }
}

/// `λ(t)` for `t ∈ [0, r]`.
pub fn a_lambda_profile<F: Real>(p: &AConstructionParams<F>, t: F) -> Result<F, ModelFlowError> {
    p.validate()?;
    if !(t >= F::zero() && t <= p.r) {
        return Err(ModelFlowError::InvalidParams(format!("t = {t:?} outside [0, r]")));
    }
    Ok(lambda_unchecked(p, t))
}

fn lambda_unchecked<F: Real>(p: &AConstructionParams<F>, t: F) -> F {
    if p.cutoff == Cutoff::Off {
        return F::one();
    }
    let th = theta(p, t);
    if th == F::zero() {
        return if t >= p.r - p.delta { p.gamma } else { F::one() };
    }
    let inner = p.b / (p.d * t);
    if t <= p.mu + p.delta {
        (F::one() - th) + th * inner
    } else if t < p.r - p.delta {
        inner
    } else {
        p.gamma * (F::one() - th) + th * inner
    }
}

/// `v₁(z) = λ(|z|)·v₀(z)` on the ball of radius `r`, `Γ·v₀` outside.
pub fn a_field<F: Real>(p: &AConstructionParams<F>, z: &ModelPoint<F>) -> ModelPoint<F> {
    let n = z.norm();
    let l = if n > p.r { p.gamma } else { lambda_unchecked(p, n) };
    ModelPoint {
        x: z.x.iter().map(|&c| l * c).collect(),
        y: z.y.iter().map(|&c| -l * c).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AResidence<F> {
    pub time: F,
    pub bound: F,
    /// Part of `time` spent on `μ + δ ≤ |z| ≤ r − δ`.
    pub middle_time: F,
}

/// Time the `v₁`-trajectory through `z0` spends in `μ ≤ |z| ≤ r`.
///
/// `v₁` trajectories are time changes of `v₀` trajectories, so this is
/// `∫ ds / λ(|γ₀(s)|)` over the `v₀`-times `s` with `μ ≤ |γ₀(s)| ≤ r`.
pub fn a_field_residence<F: Real>(
    p: &AConstructionParams<F>,
    z0: &ModelPoint<F>,
) -> Result<AResidence<F>, ModelFlowError> {
    p.validate()?;
    let (lo, hi) = (p.mu * p.mu, p.r * p.r);
    let cuts = [(p.mu + p.delta).powi(2), (p.r - p.delta).powi(2)];
    let (mid_lo, mid_hi) = (p.mu + p.delta, p.r - p.delta);
    let mut hit = false;
    let (mut time, mut middle) = (0.0f64, 0.0f64);
    for br in branches(z0.x_norm_sq(), z0.y_norm_sq()) {
        let Some((s1, s2)) = br.shell(lo, hi) else { continue };
        hit = true;
        let mut knots = vec![s1, s2];
        if p.cutoff == Cutoff::Mollifier {
            for &c in &cuts {
                if br.q_start() < c {
                    let s = br.root(c);
                    if s > s1 && s < s2 {
                        knots.push(s);
                    }
                }
            }
        }
        knots.sort_by(|a, b| a.partial_cmp(b).expect("finite knots"));
        let integrand = |s: f64| {
            let radius = br.q(F::lit(s)).sqrt().min(p.r);
            1.0 / lambda_unchecked(p, radius).as_f64()
        };
        for w in knots.windows(2) {
            let (a, b) = (w[0].as_f64(), w[1].as_f64());
            let piece = quad::integrate(&integrand, a, b, 1e-11 * (1.0 + (b - a)));
            time += piece;
            let mid_radius = br.q(F::lit(0.5 * (a + b))).sqrt();
            if p.cutoff == Cutoff::Mollifier && mid_radius >= mid_lo && mid_radius <= mid_hi {
                middle += piece;
            }
        }
    }
    if !hit {
        return Err(ModelFlowError::NoIntersection);
    }
    Ok(AResidence {
        time: F::lit(time),
        bound: p.residence_bound(),
        middle_time: F::lit(middle),
    })
}
