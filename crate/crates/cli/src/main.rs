//! `novikov`: command-line front end.
//!
//! Exit status is 0 when every checked bound holds, 1 when one is violated
//! (the offending records are in the report) and 2 on malformed input.

mod algebra;
mod flow;
mod report;
mod stability;
mod torus;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use report::{emit, error_body, render, Format, Report};

#[derive(Parser)]
#[command(name = "novikov", version, about = "Novikov incidence series, flow residence bounds and stability checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format; CSV is available for sweeps and coefficient tables.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Truncated Laurent series and rational functions over Z.
    #[command(subcommand)]
    Series(algebra::SeriesCmd),
    /// Incidence series Σ λ(h^k p) t^(k−m) from an integer transfer matrix,
    /// as P / (t^m det(I − ht)), checked against direct evaluation.
    Transfer(algebra::TransferArgs),
    /// Residence times of the standard saddle flow (x e^t, y e^−t).
    #[command(subcommand)]
    Flow(flow::FlowCmd),
    /// RK4 integration, separation bounds, crossings and reachability.
    #[command(subcommand)]
    Stability(stability::StabilityCmd),
    /// Novikov complex of a circle-valued Morse function on the torus.
    Torus(torus::TorusArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Series(c) => algebra::series(c),
        Command::Transfer(a) => algebra::transfer(a),
        Command::Flow(c) => flow::run(c),
        Command::Stability(c) => stability::run(c),
        Command::Torus(a) => torus::run(a),
    };
    let (bytes, code) = match result.and_then(|r| Ok((render(&r, cli.format)?, r.ok))) {
        Ok((bytes, ok)) => (bytes, if ok { 0 } else { 1 }),
        Err(report::Malformed(msg)) => {
            eprintln!("novikov: {msg}");
            let r = Report { body: error_body(&msg), table: None, ok: false };
            let bytes = render(&r, Format::Json).unwrap_or_default();
            (bytes, 2)
        }
    };
    if let Err(e) = emit(&bytes, cli.output.as_deref()) {
        eprintln!("novikov: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
