//! A circle-valued Morse function on the 2-torus, signed counts of
//! gradient orbits in its infinite cyclic cover `R × S¹`, and the resulting
//! boundary matrices over `Z[[t]][t⁻¹]`.
//!
//! Conventions:
//! * a critical point `c` lifted to `c̄ tᵐ` sits at `x̃ = x_c − m`;
//! * saddles are oriented by `e_y`, the lexicographically positive unit
//!   eigenvector of the Hessian with negative eigenvalue (the unstable
//!   direction of `−v`); maxima by the standard orientation of `R²`;
//! * a saddle separatrix leaving along `±e_y` counts `±1`;
//! * an orbit from a maximum counts `+1` when, going counterclockwise around
//!   the fan, nearby rays switch from the `−e_y` side of the target saddle
//!   to the `+e_y` side.
//!
//! With these choices `∂₁∂₂ = 0` holds exactly.

mod complex;
mod count;
mod shoot;
mod system;

use thiserror::Error;

pub use complex::{
    assemble_novikov, check_d_squared, compare_counts, max_abs_count, perturb_and_recount, random_bump_center,
    run_torus, BoundaryMatrix, CountComparison, CountDifference, DSquaredReport, DSquaredTerm, EntryRecord,
    NovikovComplex, NovikovEntry, TorusConfig, TorusReport,
};
pub use count::{connections_from, count_flow_lines, count_flow_lines_lifted, dual_count, FlowLineCount};
pub use shoot::{Connection, Lift, Passage, RayOutcome, ShootConfig, Terminal};
pub use system::{find_critical_points, Bump, CriticalPoint, TorusMorseSystem, SHIELD_RADIUS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TorusError {
    #[error("degenerate critical point at {position:?} (Hessian determinant {det:e})")]
    DegenerateCritical { position: [f64; 2], det: f64 },
    #[error("index must drop by one, got {from} → {to}")]
    IndexMismatch { from: u8, to: u8 },
    #[error("unresolved: {0}")]
    Unresolved(String),
}
