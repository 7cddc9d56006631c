use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

/// What a subcommand produces: a JSON body, optionally a CSV table, and
/// whether every checked bound held.
pub struct Report {
    pub body: Value,
    pub table: Option<Table>,
    pub ok: bool,
}

pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(ok: bool, mut body: Value) -> Self {
        if let Value::Object(map) = &mut body {
            map.insert("ok".into(), Value::Bool(ok));
        }
        Self { body, table: None, ok }
    }

    pub fn with_table(mut self, headers: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.table = Some(Table { headers, rows });
        self
    }
}

/// Malformed input: exit code 2.
#[derive(Debug)]
pub struct Malformed(pub String);

impl<E: std::fmt::Display> From<E> for Malformed {
    fn from(e: E) -> Self {
        Malformed(e.to_string())
    }
}

pub fn error_body(msg: &str) -> Value {
    json!({ "ok": false, "error": msg })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn render(report: &Report, format: Format) -> Result<Vec<u8>, Malformed> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&report.body)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let table = report
                .table
                .as_ref()
                .ok_or_else(|| Malformed("this subcommand has no CSV form; use --format json".into()))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.headers)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            Ok(w.into_inner().map_err(|e| Malformed(e.to_string()))?)
        }
    }
}

pub fn emit(bytes: &[u8], output: Option<&Path>) -> std::io::Result<()> {
    match output {
        Some(path) => std::fs::write(path, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

pub fn read_input(path: &Path) -> Result<String, Malformed> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Malformed(format!("{}: {e}", path.display())))
    }
}

pub fn fmt_point(z: &[f64]) -> String {
    z.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ")
}
