//! Quantitative C⁰-stability of trajectories under perturbation of the
//! field: fixed-step RK4 with Richardson error estimates, the Gronwall
//! separation bound, unique transversal crossings and reachability.

mod crossing;
mod field;
mod gronwall;
mod integrator;
mod reach;

use thiserror::Error;

pub use crossing::{crossing_time, CrossingResult};
pub use field::FieldSpec;
pub use gronwall::{gronwall_bound, separation_check, SeparationOptions, SeparationReport, SeparationSample};
pub use integrator::{
    flow_point, integrate_ivp, integrate_ivp_with_tolerance, Rk4, TrajectoryRecord, DEFAULT_TOLERANCE,
};
pub use reach::{reach_check, ExitKind, ReachFailure, ReachProblem, ReachReport, Region};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("Richardson error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    StepTooLarge { estimate: f64, tolerance: f64 },
    #[error("separation {separation:e} exceeds bound {bound:e} (+ budget {budget:e}) at t = {t}")]
    BoundViolated {
        t: f64,
        separation: f64,
        bound: f64,
        budget: f64,
    },
    #[error("level function has the same sign at both ends of the window")]
    NoSignChange,
    #[error("level function is not monotone along the trajectory near t = {t}")]
    MultipleCrossings { t: f64 },
    #[error("declared Lipschitz bound {declared} is exceeded (observed ratio {ratio})")]
    LipschitzViolated { ratio: f64, declared: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
