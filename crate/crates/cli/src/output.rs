//! JSON and CSV rendering with fixed float formatting.

use std::collections::BTreeMap;
use std::path::Path;

use gupqm::report::{format_float, to_json};
use gupqm::C64;
use serde::{Deserialize, Serialize};

use crate::error::{usage, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(usage(format!("format must be json or csv, got '{s}'"))),
        }
    }
}

/// Complex value serialized as `{"re": x, "im": y}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

impl Cx {
    pub fn cells(&self) -> [String; 2] {
        [format_float(self.re), format_float(self.im)]
    }
}

/// Fixed CSV layout of a report.
pub trait Tabular {
    fn header() -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

/// One sweep point: the swept values next to the flattened report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord<T> {
    pub sweep: BTreeMap<String, f64>,
    #[serde(flatten)]
    pub result: T,
}

/// A bare report without sweeps, an array of [`SweepRecord`]s otherwise.
pub fn render<T: Serialize + Tabular>(
    swept: &[String],
    points: &[Vec<(String, f64)>],
    results: &[T],
    format: Format,
    pretty: bool,
) -> CliResult<String> {
    match format {
        Format::Json => {
            let mut text = if swept.is_empty() {
                to_json(&results[0], pretty)?
            } else {
                let records: Vec<SweepRecord<&T>> = points
                    .iter()
                    .zip(results)
                    .map(|(p, r)| SweepRecord { sweep: p.iter().cloned().collect(), result: r })
                    .collect();
                to_json(&records, pretty)?
            };
            text.push('\n');
            Ok(text)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let header: Vec<&str> = swept.iter().map(String::as_str).chain(T::header()).collect();
            w.write_record(&header).map_err(csv_error)?;
            for (p, r) in points.iter().zip(results) {
                let prefix: Vec<String> = p.iter().map(|(_, v)| format_float(*v)).collect();
                for row in r.rows() {
                    w.write_record(prefix.iter().chain(&row)).map_err(csv_error)?;
                }
            }
            let bytes = w.into_inner().map_err(|e| usage(format!("csv output failed: {e}")))?;
            String::from_utf8(bytes).map_err(|e| usage(format!("csv output failed: {e}")))
        }
    }
}

fn csv_error(e: csv::Error) -> CliError {
    usage(format!("csv output failed: {e}"))
}

/// Writes to `out`, or stdout when absent.
pub fn emit(text: &str, out: Option<&str>) -> CliResult<()> {
    match out {
        None | Some("-") => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Write { path: "stdout".into(), source })
        }
        Some(path) => std::fs::write(Path::new(path), text).map_err(|source| CliError::Write { path: path.into(), source }),
    }
}
