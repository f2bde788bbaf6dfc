use clap::Args;
use gupqm::green::{green_free_2d_closed, laplace_numeric, GreenQuery};
use gupqm::report::format_float;
use gupqm::VecD;
use serde::{Deserialize, Serialize};

use super::{model_params, CommandSpec, FlagList, Report};
use crate::error::{usage, CliResult};
use crate::output::{Format, Tabular};
use crate::settings::Settings;

pub const SPEC: CommandSpec = CommandSpec {
    name: "green",
    keys: &["epsilon", "separation", "alpha", "mass", "hbar", "dim", "compare-numeric"],
    sweepable: &["epsilon", "separation", "alpha", "mass", "hbar"],
    default_format: Format::Json,
};

#[derive(Args, Debug, Default)]
pub struct GreenArgs {
    /// Laplace variable, epsilon > 0 [default: 1]
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Endpoint separation |qf - q0| > 0 [default: 1]
    #[arg(long)]
    pub separation: Option<f64>,
    /// GUP parameter [default: 0]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Particle mass [default: 1]
    #[arg(long)]
    pub mass: Option<f64>,
    /// Action quantum [default: 1]
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Spatial dimension; only 2 is supported
    #[arg(long)]
    pub dim: Option<usize>,
    /// Also evaluate the Laplace integral by quadrature
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub compare_numeric: Option<bool>,
}

impl GreenArgs {
    pub fn flags(&self, out: &mut FlagList) {
        out.opt("epsilon", &self.epsilon)
            .opt("separation", &self.separation)
            .opt("alpha", &self.alpha)
            .opt("mass", &self.mass)
            .opt("hbar", &self.hbar)
            .opt("dim", &self.dim)
            .opt("compare-numeric", &self.compare_numeric);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenOut {
    pub bessel_argument: f64,
    pub correction_size: f64,
    pub closed: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub numeric: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta: Option<f64>,
}

impl Tabular for GreenOut {
    fn header() -> Vec<&'static str> {
        vec!["bessel_argument", "correction_size", "closed", "numeric", "delta"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
        vec![vec![
            format_float(self.bessel_argument),
            format_float(self.correction_size),
            format_float(self.closed),
            opt(self.numeric),
            opt(self.delta),
        ]]
    }
}

impl Report for GreenOut {}

pub fn evaluate(s: &Settings) -> CliResult<GreenOut> {
    if let Some(d) = s.usize("dim")? {
        if d != 2 {
            return Err(usage(format!("the Green's function is two-dimensional, got dim = {d}")));
        }
    }
    let params = model_params(s, 0.0, 2)?;
    let separation = s.f64_or("separation", 1.0)?;
    if separation <= 0.0 {
        return Err(usage(format!("separation must be > 0, got {separation}")));
    }
    let q0 = VecD::zeros(2);
    let qf = VecD::from([separation, 0.0]);
    let query = GreenQuery::new(params, q0.clone(), qf.clone(), s.f64_or("epsilon", 1.0)?)?;
    let closed = green_free_2d_closed(&query)?;
    let numeric = if s.bool_or("compare-numeric", false)? {
        Some(laplace_numeric(&params, &q0, &qf, query.epsilon)?)
    } else {
        None
    };
    Ok(GreenOut {
        bessel_argument: query.bessel_argument()?,
        correction_size: query.correction_size(),
        closed,
        numeric,
        delta: numeric.map(|n| n - closed),
    })
}
