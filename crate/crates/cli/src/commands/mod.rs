//! Subcommands: argument structs, settings resolution and report types.

pub mod action;
pub mod bound;
pub mod green;
pub mod kernel;
pub mod spectrum;
pub mod verify;

use std::fmt::Display;

use clap::Args;
use gupqm::{Endpoints, ModelParams, TimeArg, VecD};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{usage, CliError, CliResult};
use crate::output::{emit, render, Format, Tabular};
use crate::settings::Settings;
use crate::sweep::{check_distinct, product, SweepSpec};

/// Keys accepted by every subcommand.
pub const GLOBAL_KEYS: [&str; 6] = ["command", "format", "out", "jobs", "sweep", "pretty"];

pub trait Report: Serialize + DeserializeOwned + Tabular + Send {
    /// Whether every assertion carried by the report holds.
    fn passed(&self) -> bool {
        true
    }
}

pub struct CommandSpec {
    pub name: &'static str,
    pub keys: &'static [&'static str],
    pub sweepable: &'static [&'static str],
    pub default_format: Format,
}

impl CommandSpec {
    pub fn known_keys(&self) -> Vec<&'static str> {
        GLOBAL_KEYS.iter().chain(self.keys).copied().collect()
    }
}

/// Collects `(key, value)` pairs for the flags that were given.
pub struct FlagList(pub Vec<(&'static str, String)>);

impl FlagList {
    pub fn new() -> Self {
        FlagList(Vec::new())
    }

    pub fn opt<T: Display>(&mut self, key: &'static str, value: &Option<T>) -> &mut Self {
        if let Some(v) = value {
            self.0.push((key, v.to_string()));
        }
        self
    }

    pub fn many(&mut self, key: &'static str, values: &[String]) -> &mut Self {
        self.0.extend(values.iter().map(|v| (key, v.clone())));
        self
    }
}

/// Evaluates `eval` at every sweep point, renders and emits the report.
/// Returns whether every report passed.
pub fn execute<T, F>(spec: &CommandSpec, settings: &Settings, eval: F) -> CliResult<bool>
where
    T: Report,
    F: Fn(&Settings) -> CliResult<T> + Sync,
{
    if let Some(e) = settings.entry("command") {
        if e.raw != spec.name {
            return Err(usage(format!("{}: config is for '{}', but '{}' was requested", e.origin, e.raw, spec.name)));
        }
    }
    let specs = settings
        .list("sweep")
        .iter()
        .map(|e| SweepSpec::parse(e, spec.sweepable))
        .collect::<CliResult<Vec<_>>>()?;
    check_distinct(&specs)?;
    let swept: Vec<String> = specs.iter().map(|s| s.parameter.clone()).collect();
    let points = product(&specs);
    let format = match settings.choice("format", &["json", "csv"])? {
        Some(f) => Format::parse(&f)?,
        None => spec.default_format,
    };
    let pretty = settings.bool_or("pretty", true)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = settings.usize("jobs")? {
        if jobs == 0 {
            return Err(usage("jobs must be >= 1"));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| usage(format!("cannot start worker pool: {e}")))?;

    let results: Vec<CliResult<T>> = pool.install(|| {
        points
            .par_iter()
            .map(|p| {
                if p.is_empty() {
                    return eval(settings);
                }
                let mut s = settings.clone();
                for (k, v) in p {
                    s.set_number(k, *v);
                }
                eval(&s).map_err(|e| CliError::AtPoint { point: describe(p), source: Box::new(e) })
            })
            .collect()
    });
    let results = results.into_iter().collect::<CliResult<Vec<T>>>()?;
    let passed = results.iter().all(Report::passed);
    let text = render(&swept, &points, &results, format, pretty)?;
    emit(&text, settings.text("out"))?;
    Ok(passed)
}

fn describe(point: &[(String, f64)]) -> String {
    point.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
}

#[derive(Args, Debug, Default)]
pub struct PhysicsArgs {
    /// Particle mass [default: 1]
    #[arg(long)]
    pub mass: Option<f64>,
    /// Action quantum [default: 1]
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Oscillator frequency; 0 is the free particle
    #[arg(long)]
    pub omega: Option<f64>,
    /// GUP parameter [default: 0]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Spatial dimension; inferred from the endpoints when absent
    #[arg(long)]
    pub dim: Option<usize>,
}

impl PhysicsArgs {
    pub fn flags(&self, out: &mut FlagList) {
        out.opt("mass", &self.mass).opt("hbar", &self.hbar).opt("omega", &self.omega).opt("alpha", &self.alpha).opt(
            "dim",
            &self.dim,
        );
    }
}

#[derive(Args, Debug, Default)]
pub struct PathArgs {
    /// Initial point, comma-separated [default: origin]
    #[arg(long, allow_hyphen_values = true)]
    pub q0: Option<String>,
    /// Final point, comma-separated [default: origin]
    #[arg(long, allow_hyphen_values = true)]
    pub qf: Option<String>,
    /// Elapsed time T, or tau with --euclidean [default: 1]
    #[arg(long)]
    pub time: Option<f64>,
    /// Interpret --time as Euclidean time tau, T = -i tau
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub euclidean: Option<bool>,
}

impl PathArgs {
    pub fn flags(&self, out: &mut FlagList) {
        out.opt("q0", &self.q0).opt("qf", &self.qf).opt("time", &self.time).opt("euclidean", &self.euclidean);
    }
}

/// Dimension from `dim`, cross-checked against the listed vector settings.
pub fn resolve_dim(s: &Settings, vectors: &[&str], default: usize) -> CliResult<usize> {
    let explicit = s.usize("dim")?;
    let mut dim = explicit;
    let mut source = "dim".to_string();
    for key in vectors {
        if let Some(v) = s.vector(key)? {
            match dim {
                None => {
                    dim = Some(v.len());
                    source = key.to_string();
                }
                Some(d) if d != v.len() => {
                    return Err(usage(format!("{key} has {} components but {source} gives dimension {d}", v.len())));
                }
                Some(_) => {}
            }
        }
    }
    let dim = dim.unwrap_or(default);
    if dim == 0 {
        return Err(usage("dimension must be >= 1"));
    }
    Ok(dim)
}

pub fn model_params(s: &Settings, omega: f64, dim: usize) -> CliResult<ModelParams> {
    Ok(ModelParams::new(s.f64_or("mass", 1.0)?, s.f64_or("hbar", 1.0)?, omega, s.f64_or("alpha", 0.0)?, dim)?)
}

/// Frequency for `--system {free|sho}`; without `--system` a positive omega selects the oscillator.
pub fn system_omega(s: &Settings) -> CliResult<f64> {
    let system = s.choice("system", &["free", "sho"])?;
    let omega = s.f64("omega")?;
    match (system.as_deref(), omega) {
        (Some("free"), Some(w)) if w != 0.0 => Err(usage(format!("--system free conflicts with omega = {w}"))),
        (Some("free"), _) => Ok(0.0),
        (Some("sho"), None) => Ok(1.0),
        (Some("sho"), Some(w)) if w <= 0.0 => Err(usage(format!("--system sho needs omega > 0, got {w}"))),
        (_, w) => Ok(w.unwrap_or(0.0)),
    }
}

pub fn endpoints(s: &Settings, dim: usize) -> CliResult<Endpoints> {
    let point = |key: &str| -> CliResult<VecD> {
        match s.vector(key)? {
            Some(v) => Ok(VecD::new(v)?),
            None => Ok(VecD::zeros(dim)),
        }
    };
    let t = s.f64_or("time", 1.0)?;
    let time = if s.bool_or("euclidean", false)? { TimeArg::euclidean(t)? } else { TimeArg::real(t)? };
    Ok(Endpoints::new(point("q0")?, point("qf")?, time)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::Format;
    use std::fmt::Debug;

    fn settings(flags: &[(&'static str, &str)]) -> Settings {
        let mut s = Settings::default();
        s.apply_flags(flags.iter().map(|(k, v)| (*k, v.to_string())).collect());
        s
    }

    fn round_trip<T: Report + PartialEq + Debug>(report: T) {
        let text = render(&[], &[Vec::new()], std::slice::from_ref(&report), Format::Json, true).unwrap();
        let back: T = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn every_report_round_trips_through_json() {
        let s = settings(&[("omega", "0.8"), ("alpha", "1e-3"), ("q0", "0.3,-0.2"), ("qf", "1,0.5"), ("time", "0.7")]);
        round_trip(kernel::evaluate(&s).unwrap());
        round_trip(action::evaluate(&settings(&[("q0", "1"), ("qf", "2"), ("euclidean", "true")])).unwrap());
        round_trip(action::evaluate(&s).unwrap());
        round_trip(spectrum::evaluate(&settings(&[("dim", "2"), ("alpha", "1e-4"), ("shell", "2")])).unwrap());
        round_trip(green::evaluate(&settings(&[("alpha", "1e-2"), ("compare-numeric", "true")])).unwrap());
        round_trip(bound::evaluate(&settings(&[("alpha", "1")])).unwrap());
        round_trip(verify::evaluate(&settings(&[("suite", "eom"), ("trials", "2")])).unwrap());
    }

    #[test]
    fn dimension_is_inferred_and_cross_checked() {
        assert_eq!(resolve_dim(&settings(&[("q0", "1,2,3")]), &["q0", "qf"], 1).unwrap(), 3);
        assert_eq!(resolve_dim(&settings(&[]), &["q0", "qf"], 1).unwrap(), 1);
        assert!(resolve_dim(&settings(&[("q0", "1,2"), ("qf", "1")]), &["q0", "qf"], 1).is_err());
        assert!(resolve_dim(&settings(&[("dim", "2"), ("qf", "1")]), &["q0", "qf"], 1).is_err());
    }

    #[test]
    fn system_selection() {
        assert_eq!(system_omega(&settings(&[])).unwrap(), 0.0);
        assert_eq!(system_omega(&settings(&[("system", "sho")])).unwrap(), 1.0);
        assert_eq!(system_omega(&settings(&[("omega", "2")])).unwrap(), 2.0);
        assert!(system_omega(&settings(&[("system", "free"), ("omega", "2")])).is_err());
        assert!(system_omega(&settings(&[("system", "sho"), ("omega", "0")])).is_err());
    }
}
