//! `flow` subcommands: residence-time sweeps of the standard saddle flow.

use clap::{Subcommand, ValueEnum};
use novikov::modelflow::sweep::{a_field_sweep, annulus_sweep, lens_sweep, SweepRow};
use novikov::modelflow::{choose_delta, lln, quickness_halving, AConstructionParams, AnnulusSpec, Cutoff};
use serde_json::json;

use crate::report::{fmt_point, Malformed, Report};

/// Slack below which a residence time counts as exceeding its bound.
const TIME_TOLERANCE: f64 = 1e-9;
const A_FIELD_TOLERANCE: f64 = 1e-6;

#[derive(Subcommand)]
pub enum FlowCmd {
    /// Time spent in r ≤ |z| ≤ R by random trajectories of the saddle flow,
    /// against ln((R/r)² + √((R/r)⁴ − 1)); arc length against 2R.
    Annulus {
        #[arg(long, default_value_t = 2.0)]
        outer: f64,
        #[arg(long, default_value_t = 1.0)]
        inner: f64,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Time spent in the lens |f₀| ≤ r², |z| ≥ r, against 2.
    Lens {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Time spent in μ ≤ |z| ≤ r by the radially rescaled field λ(|z|)·v₀,
    /// against 3Dr/B (or ln-bound of the plain annulus when the cutoff is off).
    Aconstruction {
        /// Outer chart radius r.
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Inner radius μ.
        #[arg(long, default_value_t = 0.2)]
        mu: f64,
        /// Collar width δ; defaults to half the largest admissible value.
        #[arg(long)]
        delta: Option<f64>,
        /// Allowed speed-up Γ ≥ 1.
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Norm bound B of the field.
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Chart distortion D ≥ 1.
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        #[arg(long, value_enum, default_value_t = CutoffArg::Mollifier)]
        cutoff: CutoffArg,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Quickness constant β + 8N after halving, with the per-chart constant
    /// ln(4 + √15) ≤ 8 checked.
    Quickness {
        /// Number of critical points.
        #[arg(long = "N")]
        n: u64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
    },
}

#[derive(clap::Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Dimensions are drawn from 1..=max-dim, indices from 0..=dim.
    #[arg(long, default_value_t = 6)]
    max_dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum CutoffArg {
    Mollifier,
    Off,
}

fn sweep_report(kind: &str, params: serde_json::Value, rows: Vec<SweepRow>, tolerance: f64) -> Report {
    let bad = |r: &SweepRow| {
        r.slack < -tolerance || matches!((r.length, r.length_bound), (Some(l), Some(b)) if l > b + tolerance)
    };
    let violations: Vec<&SweepRow> = rows.iter().filter(|r| bad(r)).collect();
    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let max_time = rows.iter().map(|r| r.time).fold(0.0, f64::max);
    let ok = violations.is_empty();
    let body = json!({
        "kind": kind,
        "params": params,
        "samples": rows.len(),
        "max_time": max_time,
        "min_slack": if rows.is_empty() { None } else { Some(min_slack) },
        "tolerance": tolerance,
        "violations": violations,
        "rows": rows,
    });
    let table = rows
        .iter()
        .map(|r| {
            vec![
                r.id.to_string(),
                fmt_point(&r.start),
                r.index.to_string(),
                r.time.to_string(),
                r.bound.to_string(),
                r.slack.to_string(),
            ]
        })
        .collect();
    Report::new(ok, body).with_table(vec!["id", "start", "index", "time", "bound", "slack"], table)
}

fn check_sweep(s: &SweepArgs) -> Result<(), Malformed> {
    if s.max_dim == 0 {
        return Err(Malformed("--max-dim must be at least 1".into()));
    }
    Ok(())
}

pub fn run(cmd: &FlowCmd) -> Result<Report, Malformed> {
    match cmd {
        FlowCmd::Annulus { outer, inner, sweep } => {
            check_sweep(sweep)?;
            let spec = AnnulusSpec::new(*outer, *inner)?;
            let rows = annulus_sweep(&spec, sweep.samples, sweep.max_dim, sweep.seed);
            let params = json!({
                "outer": outer, "inner": inner, "seed": sweep.seed, "max_dim": sweep.max_dim,
                "time_bound": spec.time_bound(), "length_bound": spec.length_bound(),
            });
            Ok(sweep_report("annulus", params, rows, TIME_TOLERANCE))
        }
        FlowCmd::Lens { radius, sweep } => {
            check_sweep(sweep)?;
            if !(*radius > 0.0) {
                return Err(Malformed(format!("--radius must be positive, got {radius}")));
            }
            let rows = lens_sweep(*radius, sweep.samples, sweep.max_dim, sweep.seed);
            let params = json!({ "radius": radius, "seed": sweep.seed, "max_dim": sweep.max_dim, "time_bound": 2.0 });
            Ok(sweep_report("lens", params, rows, TIME_TOLERANCE))
        }
        FlowCmd::Aconstruction { r, mu, delta, gamma, b, d, cutoff, sweep } => {
            check_sweep(sweep)?;
            let cutoff = match cutoff {
                CutoffArg::Mollifier => Cutoff::Mollifier,
                CutoffArg::Off => Cutoff::Off,
            };
            let delta = match (delta, cutoff) {
                (Some(x), _) => *x,
                (None, Cutoff::Mollifier) => choose_delta(*r, *mu, *b, *d)?,
                (None, Cutoff::Off) => (r - mu) / 4.0,
            };
            let p = AConstructionParams::new(*r, *mu, delta, *gamma, *b, *d, cutoff)?;
            let rows = a_field_sweep(&p, sweep.samples, sweep.max_dim, sweep.seed);
            let params = json!({
                "construction": p, "seed": sweep.seed, "max_dim": sweep.max_dim,
                "time_bound": p.residence_bound(),
            });
            Ok(sweep_report("aconstruction", params, rows, A_FIELD_TOLERANCE))
        }
        FlowCmd::Quickness { n, beta } => {
            if !beta.is_finite() || *beta < 0.0 {
                return Err(Malformed(format!("--beta must be a nonnegative number, got {beta}")));
            }
            let constant = lln(2.0f64);
            let closed_form = (4.0 + 15f64.sqrt()).ln();
            let constant_ok = (constant - closed_form).abs() <= 1e-12 && constant <= 8.0;
            let q = quickness_halving(*n, *beta);
            let body = json!({
                "N": n,
                "beta": beta,
                "quickness": q,
                "annulus_constant": constant,
                "annulus_constant_closed_form": closed_form,
                "constant_ok": constant_ok,
            });
            let row = vec![n.to_string(), beta.to_string(), q.to_string(), constant.to_string()];
            Ok(Report::new(constant_ok, body).with_table(vec!["N", "beta", "quickness", "annulus_constant"], vec![row]))
        }
    }
}
