use clap::Args;
use gupqm::report::format_float;
use gupqm::spectral::{formula_levels, oscillator_matrix_oracle, shell_comparison, ShellComparison};
use serde::{Deserialize, Serialize};

use super::{model_params, resolve_dim, CommandSpec, FlagList, Report};
use crate::error::{usage, CliResult};
use crate::output::{Format, Tabular};
use crate::settings::Settings;

pub const SPEC: CommandSpec = CommandSpec {
    name: "spectrum",
    keys: &["mass", "hbar", "omega", "alpha", "dim", "levels", "basis", "shell"],
    sweepable: &["mass", "hbar", "omega", "alpha"],
    default_format: Format::Json,
};

#[derive(Args, Debug, Default)]
pub struct SpectrumArgs {
    /// Number of lowest levels [default: 10]
    #[arg(long)]
    pub levels: Option<usize>,
    /// Number states per axis for the matrix oracle [default: 32]
    #[arg(long)]
    pub basis: Option<usize>,
    /// Also compare the degenerate shell n1 + n2 = SHELL (two dimensions)
    #[arg(long)]
    pub shell: Option<u32>,
    /// Particle mass [default: 1]
    #[arg(long)]
    pub mass: Option<f64>,
    /// Action quantum [default: 1]
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Oscillator frequency [default: 1]
    #[arg(long)]
    pub omega: Option<f64>,
    /// GUP parameter [default: 0]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Spatial dimension, 1 or 2 [default: 1]
    #[arg(long)]
    pub dim: Option<usize>,
}

impl SpectrumArgs {
    pub fn flags(&self, out: &mut FlagList) {
        out.opt("levels", &self.levels)
            .opt("basis", &self.basis)
            .opt("shell", &self.shell)
            .opt("mass", &self.mass)
            .opt("hbar", &self.hbar)
            .opt("omega", &self.omega)
            .opt("alpha", &self.alpha)
            .opt("dim", &self.dim);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub index: usize,
    pub n1: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n2: Option<u32>,
    pub formula: f64,
    pub oracle: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOut {
    pub levels: Vec<LevelRow>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub shell: Option<ShellComparison>,
}

impl Tabular for SpectrumOut {
    fn header() -> Vec<&'static str> {
        vec!["index", "n1", "n2", "formula", "oracle", "delta"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.levels
            .iter()
            .map(|l| {
                vec![
                    l.index.to_string(),
                    l.n1.to_string(),
                    l.n2.map(|n| n.to_string()).unwrap_or_default(),
                    format_float(l.formula),
                    format_float(l.oracle),
                    format_float(l.delta),
                ]
            })
            .collect()
    }
}

impl Report for SpectrumOut {}

pub fn evaluate(s: &Settings) -> CliResult<SpectrumOut> {
    let dim = resolve_dim(s, &[], 1)?;
    let params = model_params(s, s.f64_or("omega", 1.0)?, dim)?;
    if params.is_free() {
        return Err(usage("spectrum needs omega > 0"));
    }
    let count = s.usize("levels")?.unwrap_or(10);
    let basis = s.usize("basis")?.unwrap_or(32);
    let formula = formula_levels(&params, count)?;
    let oracle = oscillator_matrix_oracle(&params, basis, count)?;
    let levels = formula
        .iter()
        .zip(&oracle)
        .enumerate()
        .map(|(index, (f, &o))| LevelRow { index, n1: f.n1, n2: f.n2, formula: f.value, oracle: o, delta: o - f.value })
        .collect();
    let shell = s.usize("shell")?.map(|n| shell_comparison(&params, n as u32, basis)).transpose()?;
    Ok(SpectrumOut { levels, shell })
}
