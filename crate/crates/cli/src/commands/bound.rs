use clap::Args;
use gupqm::gup::{bound_curve, minimal_length};
use gupqm::report::format_float;
use serde::{Deserialize, Serialize};

use super::{CommandSpec, FlagList, Report};
use crate::error::{usage, CliResult};
use crate::output::{Format, Tabular};
use crate::settings::Settings;
use crate::sweep::{grid, Scale};

pub const SPEC: CommandSpec = CommandSpec {
    name: "bound",
    keys: &["alpha", "hbar", "dp-min", "dp-max", "samples", "log"],
    sweepable: &["alpha", "hbar"],
    default_format: Format::Csv,
};

#[derive(Args, Debug, Default)]
pub struct BoundArgs {
    /// GUP parameter [default: 0]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Action quantum [default: 1]
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Smallest momentum spread [default: 0.1]
    #[arg(long)]
    pub dp_min: Option<f64>,
    /// Largest momentum spread [default: 10]
    #[arg(long)]
    pub dp_max: Option<f64>,
    /// Grid size [default: 100]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Space the grid logarithmically
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub log: Option<bool>,
}

impl BoundArgs {
    pub fn flags(&self, out: &mut FlagList) {
        out.opt("alpha", &self.alpha)
            .opt("hbar", &self.hbar)
            .opt("dp-min", &self.dp_min)
            .opt("dp-max", &self.dp_max)
            .opt("samples", &self.samples)
            .opt("log", &self.log);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    #[serde(rename = "dP")]
    pub dp: f64,
    #[serde(rename = "dQ_bound")]
    pub dq_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundOut {
    pub dq_min: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dp_star: Option<f64>,
    pub curve: Vec<BoundPoint>,
}

impl Tabular for BoundOut {
    fn header() -> Vec<&'static str> {
        vec!["dP", "dQ_bound"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.curve.iter().map(|p| vec![format_float(p.dp), format_float(p.dq_bound)]).collect()
    }
}

impl Report for BoundOut {}

pub fn evaluate(s: &Settings) -> CliResult<BoundOut> {
    let alpha = s.f64_or("alpha", 0.0)?;
    let hbar = s.f64_or("hbar", 1.0)?;
    let lo = s.f64_or("dp-min", 0.1)?;
    let hi = s.f64_or("dp-max", 10.0)?;
    let samples = s.usize("samples")?.unwrap_or(100);
    if !(lo > 0.0 && hi >= lo) {
        return Err(usage(format!("need 0 < dp-min <= dp-max, got {lo} and {hi}")));
    }
    if samples == 0 {
        return Err(usage("samples must be >= 1"));
    }
    let scale = if s.bool_or("log", false)? { Scale::Log } else { Scale::Linear };
    let min = minimal_length(alpha, hbar)?;
    let curve = bound_curve(alpha, hbar, &grid(lo, hi, samples, scale))?
        .into_iter()
        .map(|(dp, dq_bound)| BoundPoint { dp, dq_bound })
        .collect();
    Ok(BoundOut { dq_min: min.dq_min, dp_star: min.dp_star, curve })
}
