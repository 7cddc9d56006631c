//! Monte-Carlo sweeps of the residence bounds over random starts.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    a_field_residence, annulus_residence, lens_residence, AConstructionParams, AnnulusSpec, ModelFlowError,
    ModelPoint,
};

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub id: usize,
    pub start: Vec<f64>,
    pub index: usize,
    pub time: f64,
    pub bound: f64,
    pub slack: f64,
    /// Arc length and its bound, for annulus sweeps.
    pub length: Option<f64>,
    pub length_bound: Option<f64>,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.slack >= 0.0 && match (self.length, self.length_bound) {
            (Some(l), Some(b)) => l <= b,
            _ => true,
        }
    }
}

/// Random point of dimension `1..=max_dim`, random index, coordinates
/// uniform in `[−scale, scale]`.
pub fn random_point(rng: &mut ChaCha8Rng, max_dim: usize, scale: f64) -> ModelPoint<f64> {
    let n = rng.random_range(1..=max_dim);
    let k = rng.random_range(0..=n);
    let z: Vec<f64> = (0..n).map(|_| rng.random_range(-scale..=scale)).collect();
    ModelPoint::from_coords(&z, k)
}

fn collect(
    samples: usize,
    seed: u64,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> ModelPoint<f64>,
    mut eval: impl FnMut(&ModelPoint<f64>) -> Result<(f64, f64, Option<(f64, f64)>), ModelFlowError>,
) -> Vec<SweepRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(samples);
    while rows.len() < samples {
        let z = draw(&mut rng);
        let Ok((time, bound, len)) = eval(&z) else { continue };
        rows.push(SweepRow {
            id: rows.len(),
            start: z.coords(),
            index: z.index(),
            time,
            bound,
            slack: bound - time,
            length: len.map(|l| l.0),
            length_bound: len.map(|l| l.1),
        });
    }
    rows
}

/// Starts that miss the region are redrawn.
pub fn annulus_sweep(spec: &AnnulusSpec<f64>, samples: usize, max_dim: usize, seed: u64) -> Vec<SweepRow> {
    let scale = 1.5 * spec.outer;
    collect(samples, seed, |rng| random_point(rng, max_dim, scale), |z| {
        let r = annulus_residence(z, spec)?;
        Ok((r.time, r.time_bound, Some((r.length, r.length_bound))))
    })
}

pub fn lens_sweep(r: f64, samples: usize, max_dim: usize, seed: u64) -> Vec<SweepRow> {
    collect(samples, seed, |rng| random_point(rng, max_dim, 3.0 * r), |z| {
        Ok((lens_residence(z, r)?, 2.0, None))
    })
}

pub fn a_field_sweep(
    params: &AConstructionParams<f64>,
    samples: usize,
    max_dim: usize,
    seed: u64,
) -> Vec<SweepRow> {
    collect(samples, seed, |rng| random_point(rng, max_dim, 1.5 * params.r), |z| {
        let r = a_field_residence(params, z)?;
        Ok((r.time, r.bound, None))
    })
}
