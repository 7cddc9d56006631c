use std::fmt;
use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::StabilityError;
use crate::scalar::Real;

type EvalFn<F> = dyn Fn(&[F], &mut [F]) + Send + Sync;

/// A `C¹` vector field on `Rⁿ` with a declared bound `D` on the norm of its
/// derivative and a box `[-R, R]ⁿ` outside of which it is considered to
/// vanish (or at least not to matter).
#[derive(Clone)]
pub struct FieldSpec<F> {
    dim: usize,
    eval: Arc<EvalFn<F>>,
    lipschitz: F,
    support_radius: F,
}

impl<F: Real> fmt::Debug for FieldSpec<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("dim", &self.dim)
            .field("lipschitz", &self.lipschitz)
            .field("support_radius", &self.support_radius)
            .finish_non_exhaustive()
    }
}

impl<F: Real> FieldSpec<F> {
    pub fn new(
        dim: usize,
        lipschitz: F,
        support_radius: F,
        eval: impl Fn(&[F], &mut [F]) + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            eval: Arc::new(eval),
            lipschitz,
            support_radius,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(dim, F::one(), F::one(), |_, out| out.fill(F::zero()))
    }

    /// Scalar affine field `x' = D x + c`.
    pub fn affine_scalar(d: F, c: F, support_radius: F) -> Self {
        Self::new(1, d.abs(), support_radius, move |x, out| out[0] = d * x[0] + c)
    }

    /// The standard saddle `(x, y) ↦ (x, −y)` on `R^k × R^{n−k}`.
    pub fn model_saddle(unstable: usize, dim: usize, support_radius: F) -> Self {
        Self::new(dim, F::one(), support_radius, move |z, out| {
            for i in 0..dim {
                out[i] = if i < unstable { z[i] } else { -z[i] };
            }
        })
    }

    /// `self + extra`, with Lipschitz bound `D_self + D_extra`.
    pub fn plus(&self, extra: &FieldSpec<F>) -> Self {
        assert_eq!(self.dim, extra.dim);
        let (a, b) = (self.eval.clone(), extra.eval.clone());
        let dim = self.dim;
        Self::new(
            dim,
            self.lipschitz + extra.lipschitz,
            self.support_radius.max(extra.support_radius),
            move |z, out| {
                let mut tmp = vec![F::zero(); dim];
                a(z, out);
                b(z, &mut tmp);
                for (o, t) in out.iter_mut().zip(&tmp) {
                    *o = *o + *t;
                }
            },
        )
    }

    /// `−self`.
    pub fn reversed(&self) -> Self {
        let a = self.eval.clone();
        Self::new(self.dim, self.lipschitz, self.support_radius, move |z, out| {
            a(z, out);
            for o in out.iter_mut() {
                *o = -*o;
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lipschitz(&self) -> F {
        self.lipschitz
    }

    pub fn support_radius(&self) -> F {
        self.support_radius
    }

    #[inline]
    pub fn eval_into(&self, z: &[F], out: &mut [F]) {
        (self.eval)(z, out)
    }

    pub fn eval(&self, z: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.dim];
        self.eval_into(z, &mut out);
        out
    }

    /// Spot-check `|f(a) − f(b)| ≤ D |a − b|` on random pairs in the support box.
    pub fn check_lipschitz(&self, pairs: usize, seed: u64) -> Result<(), StabilityError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = self.support_radius.as_f64();
        for _ in 0..pairs {
            let a: Vec<F> = (0..self.dim).map(|_| F::lit(rng.random_range(-r..=r))).collect();
            let b: Vec<F> = a
                .iter()
                .map(|&x| x + F::lit(rng.random_range(-1e-2..=1e-2) * r.max(1e-12)))
                .collect();
            let (fa, fb) = (self.eval(&a), self.eval(&b));
            let lhs = norm_diff(&fa, &fb);
            let rhs = self.lipschitz * norm_diff(&a, &b);
            if lhs > rhs * F::lit(1.0 + 1e-9) {
                return Err(StabilityError::LipschitzViolated {
                    ratio: (lhs / norm_diff(&a, &b)).as_f64(),
                    declared: self.lipschitz.as_f64(),
                });
            }
        }
        Ok(())
    }

    /// Measured sup-norm gap `max |self(z) − other(z)|` over a uniform grid
    /// on the support box, `per_axis` points per axis with the total capped
    /// at `max_points`.
    pub fn sup_gap(&self, other: &FieldSpec<F>, per_axis: usize, max_points: usize) -> F {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut per = per_axis.max(2);
        while n > 0 && (per as f64).powi(n as i32) > max_points as f64 && per > 2 {
            per -= 1;
        }
        let r = self.support_radius.max(other.support_radius);
        let coord = |i: usize| -r + (r + r) * F::lit(i as f64 / (per - 1) as f64);
        let mut idx = vec![0usize; n];
        let mut z = vec![F::zero(); n];
        let (mut a, mut b) = (vec![F::zero(); n], vec![F::zero(); n]);
        let mut gap = F::zero();
        loop {
            for (zi, &ii) in z.iter_mut().zip(&idx) {
                *zi = coord(ii);
            }
            self.eval_into(&z, &mut a);
            other.eval_into(&z, &mut b);
            gap = gap.max(norm_diff(&a, &b));
            // odometer increment
            let mut k = 0;
            while k < n {
                idx[k] += 1;
                if idx[k] < per {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
        gap
    }
}

pub(crate) fn norm_diff<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .fold(F::zero(), |s, v| s + v)
        .sqrt()
}
