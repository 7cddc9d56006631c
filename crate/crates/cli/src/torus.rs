//! `torus` subcommand.

use clap::Args;
use novikov::torus::{run_torus, ShootConfig, TorusConfig};
use serde_json::json;

use crate::report::{Malformed, Report};

/// Flow-line counts of f(x, y) = x + (a/2π) sin 2πx cos 2πy on the torus
/// in its infinite cyclic cover, the resulting boundary series, rational
/// fits and checks.
#[derive(Args)]
pub struct TorusArgs {
    /// Amplitude a; the function is Morse with eight critical points for a > 1.
    #[arg(long, default_value_t = 1.3)]
    amplitude: f64,
    /// Counts n_k are collected for k below this horizon.
    #[arg(long, default_value_t = 8)]
    terms: i64,
    /// Order up to which d∘d = 0 is checked.
    #[arg(long, default_value_t = 6)]
    d_squared_order: i64,
    /// Rays launched around each saddle before bracket refinement.
    #[arg(long, default_value_t = 256)]
    rays: usize,
    /// RK4 step for tracing gradient lines.
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Seed for the perturbation bump center.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Size of the perturbation bump; 0 skips the perturbation check.
    #[arg(long, default_value_t = 1e-3)]
    bump: f64,
    /// Recount with half the step and compare.
    #[arg(long)]
    check_halving: bool,
}

pub fn run(args: &TorusArgs) -> Result<Report, Malformed> {
    if !(args.amplitude > 0.0) || args.terms < 1 || args.rays < 4 || !(args.step > 0.0) || args.bump < 0.0 {
        return Err(Malformed(
            "need --amplitude > 0, --terms ≥ 1, --rays ≥ 4, --step > 0 and --bump ≥ 0".into(),
        ));
    }
    let config = TorusConfig {
        amplitude: args.amplitude,
        terms: args.terms,
        d_squared_order: args.d_squared_order,
        shoot: ShootConfig { rays: args.rays, step: args.step, ..ShootConfig::default() },
        seed: args.seed,
        bump_size: (args.bump > 0.0).then_some(args.bump),
        check_step_halving: args.check_halving,
    };
    let rep = match run_torus(&config) {
        Ok(r) => r,
        Err(e) => {
            let body = json!({ "config": config, "failure": e.to_string() });
            return Ok(Report::new(false, body));
        }
    };
    let counts: Vec<_> = rep
        .entries
        .iter()
        .map(|e| json!({ "source": e.source, "target": e.target, "lowest": e.lowest, "counts": e.counts }))
        .collect();
    let fitted: Vec<_> = rep
        .entries
        .iter()
        .map(|e| {
            json!({
                "source": e.source,
                "target": e.target,
                "rational": e.fitted,
                "display": e.fitted.as_ref().map(ToString::to_string),
                "prediction_ok": e.prediction_ok,
            })
        })
        .collect();
    let growth: Vec<_> = rep
        .entries
        .iter()
        .map(|e| json!({ "source": e.source, "target": e.target, "rate": e.growth_rate, "ok": e.growth_ok }))
        .collect();
    let rows = rep
        .entries
        .iter()
        .flat_map(|e| {
            e.counts.iter().enumerate().map(move |(i, n)| {
                vec![e.source.to_string(), e.target.to_string(), (e.lowest + i as i64).to_string(), n.to_string()]
            })
        })
        .collect();
    let ok = rep.ok();
    let body = json!({
        "config": rep.config,
        "critical_points": rep.critical_points,
        "euler_characteristic": rep.euler_characteristic,
        "counts": counts,
        "fitted": fitted,
        "growth": growth,
        "d_squared_ok": rep.d_squared_ok,
        "d_squared": rep.d_squared,
        "dual_agrees": rep.dual_agrees,
        "negative_exponents": rep.negative_exponents,
        "perturbation": rep.perturbation.as_ref().map(|(b, c)| json!({ "bump": b, "comparison": c })),
        "step_halving": rep.step_halving,
    });
    Ok(Report::new(ok, body).with_table(vec!["source", "target", "k", "n_k"], rows))
}
