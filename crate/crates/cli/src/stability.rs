//! `stability` subcommands: separation bounds, crossings and reachability
//! on small reference systems.

use clap::Subcommand;
use novikov::stability::{
    crossing_time, reach_check, separation_check, FieldSpec, ReachProblem, SeparationOptions, SeparationReport,
    StabilityError,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::{fmt_point, Malformed, Report};

#[derive(Subcommand)]
pub enum StabilityCmd {
    /// Separation of a u-trajectory and a w-trajectory against
    /// ε e^{Dt} + (α/D)(e^{Dt} − 1).
    ///
    /// By default u = D x and w = D x + α on the line, where the bound is
    /// attained. With --random N, N pairs u_i = Σ a_ij sin(x_j + φ_ij),
    /// D = ‖a‖_F, and w = u + a small offset are checked instead.
    Gronwall {
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        /// Initial offset ε = |x₀ − y₀|.
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
        x0: f64,
        /// Lipschitz constant used in the bound; defaults to |D|. Understating it
        /// makes the check fail.
        #[arg(long)]
        declared_d: Option<f64>,
        #[arg(long, default_value_t = 3.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-2)]
        step: f64,
        /// Largest tolerated Richardson error estimate.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        /// Grid points per axis when measuring α = sup |u − w|.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 4)]
        max_dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// First time the saddle flow (x, y) ↦ (x, −y) on R^k × R^{n−k} meets
    /// the hyperplane z[coord] = level, found by sampling and bisection.
    Crossing {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Number k of expanding coordinates.
        #[arg(long, default_value_t = 1)]
        unstable: usize,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0.5,1.0")]
        start: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        coord: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        level: f64,
        /// Search window `lo,hi` in time.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "-1,3")]
        window: Vec<f64>,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Exits of a planar saddle from the box |x|, |y| ≤ 1 through x = 1,
    /// before and after adding a Gaussian bump of the given size near the
    /// stable manifold; perturbed exits must stay in |y| ≤ 0.6.
    Reach {
        #[arg(long, default_value_t = 1e-3)]
        bump: f64,
        /// Sample grid is grid × grid points in [0.2, 0.5] × [−0.8, 0.8].
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[arg(long, default_value_t = 0.01)]
        jitter: f64,
        #[arg(long, default_value_t = 2)]
        copies: usize,
        #[arg(long, default_value_t = 20.0)]
        t_max: f64,
        #[arg(long, default_value_t = 1e-2)]
        step: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn summary(rep: &SeparationReport) -> Value {
    json!({
        "case": rep.case,
        "t_worst": rep.t_worst,
        "separation": rep.separation,
        "bound": rep.bound,
        "slack": rep.slack,
        "budget": rep.budget,
        "eps": rep.eps,
        "alpha": rep.alpha,
        "lipschitz": rep.lipschitz,
    })
}

/// One checked pair: a summary, a table row, and whether it held.
fn case_outcome(case: &str, res: Result<SeparationReport, StabilityError>) -> Result<(Value, Vec<String>, bool), Malformed> {
    match res {
        Ok(rep) => {
            let row = vec![
                rep.case.clone(),
                rep.t_worst.to_string(),
                rep.separation.to_string(),
                rep.bound.to_string(),
                rep.slack.to_string(),
            ];
            Ok((summary(&rep), row, true))
        }
        Err(StabilityError::BoundViolated { t, separation, bound, budget }) => {
            let row = vec![case.to_string(), t.to_string(), separation.to_string(), bound.to_string(), (bound - separation).to_string()];
            let v = json!({
                "case": case, "t_worst": t, "separation": separation, "bound": bound,
                "slack": bound - separation, "budget": budget, "violated": true,
            });
            Ok((v, row, false))
        }
        Err(StabilityError::StepTooLarge { estimate, tolerance }) => {
            let v = json!({ "case": case, "error": "step too large", "estimate": estimate, "tolerance": tolerance });
            Ok((v, vec![case.to_string(), String::new(), String::new(), String::new(), String::new()], false))
        }
        Err(e) => Err(Malformed(e.to_string())),
    }
}

fn sine_pair(rng: &mut ChaCha8Rng, max_dim: usize) -> (FieldSpec<f64>, FieldSpec<f64>, Vec<f64>, Vec<f64>) {
    let n = rng.random_range(1..=max_dim);
    let a: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let phi: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    let d = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let u = FieldSpec::new(n, d, 2.0, move |x: &[f64], o: &mut [f64]| {
        for i in 0..n {
            o[i] = (0..n).map(|j| a[i * n + j] * (x[j] + phi[i * n + j]).sin()).sum();
        }
    });
    let off: Vec<f64> = (0..n).map(|_| rng.random_range(-0.05..0.05)).collect();
    let w = u.plus(&FieldSpec::new(n, 0.0, 2.0, move |_: &[f64], o: &mut [f64]| o.copy_from_slice(&off)));
    let x0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let y0 = x0.iter().map(|x| x + rng.random_range(-0.01..0.01)).collect();
    (u, w, x0, y0)
}

pub fn run(cmd: &StabilityCmd) -> Result<Report, Malformed> {
    match cmd {
        StabilityCmd::Gronwall { d, alpha, eps, x0, declared_d, t_end, step, tolerance, grid, random, max_dim, seed } => {
            let opts = SeparationOptions {
                step: *step,
                tolerance: *tolerance,
                grid_per_axis: *grid,
                ..SeparationOptions::default()
            };
            let headers = vec!["case", "t_worst", "separation", "bound", "slack"];
            if let Some(count) = random {
                if *max_dim == 0 {
                    return Err(Malformed("--max-dim must be at least 1".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let (mut cases, mut rows, mut ok) = (Vec::new(), Vec::new(), true);
                for i in 0..*count {
                    let (u, w, x0, y0) = sine_pair(&mut rng, *max_dim);
                    let name = format!("sine-{i}");
                    let (v, row, good) = case_outcome(&name, separation_check(&name, &u, &w, &x0, &y0, *t_end, &opts))?;
                    cases.push(v);
                    rows.push(row);
                    ok &= good;
                }
                let body = json!({ "seed": seed, "t_end": t_end, "cases": cases });
                return Ok(Report::new(ok, body).with_table(headers, rows));
            }
            let (d, alpha) = (*d, *alpha);
            let lip = declared_d.unwrap_or(d.abs());
            let u = FieldSpec::new(1, lip, 3.0, move |x: &[f64], o: &mut [f64]| o[0] = d * x[0]);
            let w = FieldSpec::affine_scalar(d, alpha, 3.0);
            let (v, row, ok) = case_outcome("linear", separation_check("linear", &u, &w, &[*x0], &[*x0 + eps], *t_end, &opts))?;
            Ok(Report::new(ok, v).with_table(headers, vec![row]))
        }
        StabilityCmd::Crossing { dim, unstable, start, coord, level, window, step } => {
            if start.len() != *dim || coord >= dim || unstable > dim || window.len() != 2 {
                return Err(Malformed(format!(
                    "need --start with {dim} coordinates, --coord < {dim}, --unstable ≤ {dim} and --window lo,hi"
                )));
            }
            let v = FieldSpec::model_saddle(*unstable, *dim, 10.0);
            let (c, l) = (*coord, *level);
            // z_c(t) = z_c(0) e^{±t}
            let ratio = l / start[c];
            let exact = (ratio > 0.0).then(|| if c < *unstable { ratio.ln() } else { -ratio.ln() });
            let params = json!({
                "dim": dim, "unstable": unstable, "start": start, "coord": coord,
                "level": level, "window": window, "step": step,
            });
            match crossing_time(&v, start, move |z| z[c] - l, (window[0], window[1]), *step) {
                Ok(res) => {
                    let body = json!({
                        "params": params,
                        "tau0": res.tau0,
                        "point": res.point,
                        "bracket": [res.bracket.0, res.bracket.1],
                        "exact": exact,
                        "error": exact.map(|e| (e - res.tau0).abs()),
                    });
                    let row = vec![res.tau0.to_string(), fmt_point(&res.point)];
                    Ok(Report::new(true, body).with_table(vec!["tau0", "point"], vec![row]))
                }
                Err(e @ (StabilityError::NoSignChange | StabilityError::MultipleCrossings { .. })) => {
                    let body = json!({ "params": params, "tau0": null, "failure": e.to_string(), "exact": exact });
                    Ok(Report::new(false, body).with_table(vec!["tau0", "point"], vec![]))
                }
                Err(e) => Err(Malformed(e.to_string())),
            }
        }
        StabilityCmd::Reach { bump, grid, jitter, copies, t_max, step, seed } => {
            if *grid < 2 || !(*step > 0.0) || !(*t_max > 0.0) {
                return Err(Malformed("need --grid ≥ 2, --step > 0 and --t-max > 0".into()));
            }
            let v = FieldSpec::model_saddle(1, 2, 1.0);
            let a = *bump;
            let w = FieldSpec::new(2, 1.0 + 4.0 * a.abs(), 1.0, move |z: &[f64], o: &mut [f64]| {
                let r2 = (z[0] - 0.3).powi(2) + z[1].powi(2);
                o[0] = z[0] - a * (-r2 / 0.18).exp();
                o[1] = -z[1];
            });
            let g = *grid;
            let samples: Vec<Vec<f64>> = (0..g)
                .flat_map(|i| {
                    (0..g).map(move |j| {
                        vec![0.2 + 0.3 * i as f64 / (g - 1) as f64, -0.8 + 1.6 * j as f64 / (g - 1) as f64]
                    })
                })
                .collect();
            let problem = ReachProblem {
                domain: Box::new(|z: &[f64]| z[0].abs() <= 1.0 && z[1].abs() <= 1.0),
                exit_region: Box::new(|z: &[f64]| z[0] >= 1.0),
                neighborhood: Box::new(|z: &[f64]| z[0] >= 1.0 && z[1].abs() <= 0.6),
                t_max: *t_max,
                step: *step,
                jitter: *jitter,
                jitter_copies: *copies,
                seed: *seed,
            };
            let rep = reach_check(&v, &w, &samples, &problem);
            let rows = rep
                .v_failures
                .iter()
                .map(|f| ("v", f))
                .chain(rep.w_failures.iter().map(|f| ("w", f)))
                .map(|(field, f)| {
                    vec![
                        field.to_string(),
                        fmt_point(&f.start),
                        f.exit.as_deref().map(fmt_point).unwrap_or_default(),
                        serde_json::to_value(f.kind).unwrap().as_str().unwrap_or_default().to_string(),
                    ]
                })
                .collect();
            let ok = rep.passed();
            let body = json!({ "bump": bump, "seed": seed, "report": rep });
            Ok(Report::new(ok, body).with_table(vec!["field", "start", "exit", "kind"], rows))
        }
    }
}
