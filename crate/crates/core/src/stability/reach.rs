use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::field::FieldSpec;
use super::integrator::Rk4;
use crate::scalar::Real;

pub type Region<F> = Box<dyn Fn(&[F]) -> bool + Send + Sync>;

/// A compact domain `W`, the part of its boundary the `v`-trajectories are
/// expected to leave through, and a neighborhood `U` of the `v`-exit set that
/// perturbed exits must land in.
pub struct ReachProblem<F> {
    pub domain: Region<F>,
    pub exit_region: Region<F>,
    pub neighborhood: Region<F>,
    pub t_max: F,
    pub step: F,
    /// Each sample point is also tried with `jitter_copies` random offsets of
    /// size at most `jitter` per coordinate.
    pub jitter: F,
    pub jitter_copies: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitKind {
    /// Still inside the domain at `t_max`.
    NoExit,
    /// The unperturbed trajectory left outside the exit region.
    WrongExit,
    /// The perturbed trajectory left outside the neighborhood.
    OutsideNeighborhood,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReachFailure {
    pub start: Vec<f64>,
    pub exit: Option<Vec<f64>>,
    pub kind: ExitKind,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReachReport {
    pub checked: usize,
    pub v_failures: Vec<ReachFailure>,
    pub w_failures: Vec<ReachFailure>,
}

impl ReachReport {
    pub fn passed(&self) -> bool {
        self.v_failures.is_empty() && self.w_failures.is_empty()
    }
}

/// Every `v`-trajectory from the sample must leave through `exit_region`;
/// then every `w`-trajectory must leave too, at a point of `neighborhood`.
pub fn reach_check<F: Real>(
    v: &FieldSpec<F>,
    w: &FieldSpec<F>,
    samples: &[Vec<F>],
    problem: &ReachProblem<F>,
) -> ReachReport {
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    let j = problem.jitter.as_f64();
    let mut starts = Vec::with_capacity(samples.len() * (1 + problem.jitter_copies));
    for s in samples {
        starts.push(s.clone());
        for _ in 0..problem.jitter_copies {
            starts.push(
                s.iter()
                    .map(|&c| c + F::lit(if j > 0.0 { rng.random_range(-j..=j) } else { 0.0 }))
                    .collect(),
            );
        }
    }
    let starts: Vec<Vec<F>> = starts.into_iter().filter(|s| (problem.domain)(s)).collect();
    let fail = |s: &Vec<F>, exit: Option<Vec<F>>, kind| ReachFailure {
        start: s.iter().map(|c| c.as_f64()).collect(),
        exit: exit.map(|e| e.iter().map(|c| c.as_f64()).collect()),
        kind,
    };

    let v_failures: Vec<ReachFailure> = starts
        .par_iter()
        .filter_map(|s| match exit_point(v, s, problem) {
            None => Some(fail(s, None, ExitKind::NoExit)),
            Some(e) if !(problem.exit_region)(&e) => Some(fail(s, Some(e), ExitKind::WrongExit)),
            _ => None,
        })
        .collect();
    if !v_failures.is_empty() {
        return ReachReport {
            checked: starts.len(),
            v_failures,
            w_failures: Vec::new(),
        };
    }
    let w_failures = starts
        .par_iter()
        .filter_map(|s| match exit_point(w, s, problem) {
            None => Some(fail(s, None, ExitKind::NoExit)),
            Some(e) if !(problem.neighborhood)(&e) => {
                Some(fail(s, Some(e), ExitKind::OutsideNeighborhood))
            }
            _ => None,
        })
        .collect();
    ReachReport {
        checked: starts.len(),
        v_failures,
        w_failures,
    }
}

/// First point outside the domain, located to ~1e-12 in time.
fn exit_point<F: Real>(field: &FieldSpec<F>, x0: &[F], p: &ReachProblem<F>) -> Option<Vec<F>> {
    let f = |z: &[F], o: &mut [F]| field.eval_into(z, o);
    let mut rk = Rk4::new(field.dim());
    let mut x = x0.to_vec();
    let mut t = F::zero();
    while t < p.t_max {
        let mut next = x.clone();
        rk.step(f, &mut next, p.step);
        if !(p.domain)(&next) {
            let (mut a, mut b) = (F::zero(), p.step);
            let mut out = next;
            while b - a > F::lit(1e-12) {
                let m = (a + b) * F::lit(0.5);
                let mut y = x.clone();
                rk.step(f, &mut y, m);
                if (p.domain)(&y) {
                    a = m;
                } else {
                    b = m;
                    out = y;
                }
            }
            return Some(out);
        }
        x = next;
        t = t + p.step;
    }
    None
}
