//! `series` and `transfer` subcommands.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use novikov::novring::{fit_rational, NovringError};
use novikov::transfer::{brute_force_series, incidence_series, MonodromyData};
use novikov::{IntSeries, NovikovRational};
use serde_json::json;

use crate::report::{read_input, Malformed, Report};

#[derive(Subcommand)]
pub enum SeriesCmd {
    /// Expand a rational function P(t) / (t^m Q(t)) with Q(0) = 1.
    Expand {
        /// JSON file `{"P": [...], "m": m, "Q": [...]}` with integer strings; `-` reads stdin.
        #[arg(long)]
        input: PathBuf,
        /// Number of coefficients, starting at t^-m.
        #[arg(long, default_value_t = 20)]
        terms: usize,
    },
    /// Reconstruct P / (t^m Q) from known coefficients; prints fit: null when none exists.
    Fit {
        /// JSON file `{"lead": k, "coeffs": [...], "truncation": K}`; `-` reads stdin.
        #[arg(long)]
        input: PathBuf,
        /// Largest degree tried for P and Q; needs 2·d + 2 known terms.
        /// Defaults to the largest degree the known terms support.
        #[arg(long)]
        max_degree: Option<usize>,
    },
}

#[derive(Args)]
pub struct TransferArgs {
    /// JSON file `{"h": [[...]], "lambda": [...], "p": [...], "m": m}`; `-` reads stdin.
    #[arg(long)]
    pub input: PathBuf,
    /// Coefficients compared against direct evaluation of λ(h^k p).
    #[arg(long, default_value_t = 20)]
    pub terms: usize,
}

fn series_rows(s: &IntSeries) -> Vec<Vec<String>> {
    s.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| vec![(s.lead() + i as i64).to_string(), c.to_string()])
        .collect()
}

pub fn series(cmd: &SeriesCmd) -> Result<Report, Malformed> {
    match cmd {
        SeriesCmd::Expand { input, terms } => {
            let r: NovikovRational = serde_json::from_str(&read_input(input)?)?;
            let s = r.expand(*terms);
            let body = json!({
                "rational": r,
                "display": r.to_string(),
                "series": s,
                "growth_rate": finite(r.growth_rate()),
            });
            Ok(Report::new(true, body).with_table(vec!["exponent", "coefficient"], series_rows(&s)))
        }
        SeriesCmd::Fit { input, max_degree } => {
            let s: IntSeries = serde_json::from_str(&read_input(input)?)?;
            let d = max_degree.unwrap_or(s.truncation().saturating_sub(2) / 2);
            let fit = match fit_rational(&s, d) {
                Ok(r) => Some(r),
                Err(NovringError::NoFit) => None,
                Err(e) => return Err(Malformed(e.to_string())),
            };
            let rows = match &fit {
                Some(r) => vec![vec![
                    serde_json::to_string(r.numerator())?,
                    r.shift().to_string(),
                    serde_json::to_string(r.denominator())?,
                ]],
                None => vec![],
            };
            let body = json!({
                "series": s,
                "max_degree": d,
                "fit": fit,
                "display": fit.as_ref().map(ToString::to_string),
            });
            Ok(Report::new(true, body).with_table(vec!["P", "m", "Q"], rows))
        }
    }
}

pub fn transfer(args: &TransferArgs) -> Result<Report, Malformed> {
    let data: MonodromyData = serde_json::from_str(&read_input(&args.input)?)?;
    let a = data.endomorphism()?;
    let r = incidence_series(&data)?;
    let oracle = brute_force_series(&a, &data.lambda, &data.p, args.terms)?.shift(-data.m);
    let expansion = r
        .expand(args.terms + r.shift() as usize + data.m.unsigned_abs() as usize)
        .truncate_to(oracle.precision());
    let oracle_match = expansion == oracle;
    let body = json!({
        "P": r.numerator(),
        "m": r.shift(),
        "Q": r.denominator(),
        "display": r.to_string(),
        "series": expansion,
        "oracle": oracle,
        "oracle_match": oracle_match,
        "growth_rate": finite(r.growth_rate()),
    });
    Ok(Report::new(oracle_match, body).with_table(vec!["exponent", "coefficient"], series_rows(&expansion)))
}

/// JSON has no infinities; a zero series reports no growth rate.
fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}
