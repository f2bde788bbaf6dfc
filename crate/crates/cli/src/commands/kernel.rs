use clap::Args;
use gupqm::kernels::{free_kernel, kernel, KernelValue};
use serde::{Deserialize, Serialize};

use super::{endpoints, model_params, resolve_dim, system_omega, CommandSpec, FlagList, PathArgs, PhysicsArgs, Report};
use crate::error::CliResult;
use crate::output::{Cx, Format, Tabular};
use crate::settings::Settings;

pub const SPEC: CommandSpec = CommandSpec {
    name: "kernel",
    keys: &["system", "mass", "hbar", "omega", "alpha", "dim", "q0", "qf", "time", "euclidean"],
    sweepable: &["mass", "hbar", "omega", "alpha", "time"],
    default_format: Format::Json,
};

#[derive(Args, Debug, Default)]
pub struct KernelArgs {
    /// free or sho; defaults to sho when omega > 0
    #[arg(long, value_parser = ["free", "sho"])]
    pub system: Option<String>,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub path: PathArgs,
}

impl KernelArgs {
    pub fn flags(&self, out: &mut FlagList) {
        out.opt("system", &self.system);
        self.physics.flags(out);
        self.path.flags(out);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelOut {
    pub amplitude: Cx,
    pub leading_prefactor: Cx,
    pub f: Cx,
    #[serde(rename = "S0")]
    pub s0: Cx,
    #[serde(rename = "S1")]
    pub s1: Cx,
}

impl From<&KernelValue> for KernelOut {
    fn from(k: &KernelValue) -> Self {
        KernelOut {
            amplitude: k.amplitude.into(),
            leading_prefactor: k.leading_prefactor.into(),
            f: k.f_alpha.into(),
            s0: k.s0.into(),
            s1: k.s1.into(),
        }
    }
}

impl Tabular for KernelOut {
    fn header() -> Vec<&'static str> {
        vec![
            "amplitude_re",
            "amplitude_im",
            "leading_prefactor_re",
            "leading_prefactor_im",
            "f_re",
            "f_im",
            "S0_re",
            "S0_im",
            "S1_re",
            "S1_im",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![[self.amplitude, self.leading_prefactor, self.f, self.s0, self.s1].iter().flat_map(Cx::cells).collect()]
    }
}

impl Report for KernelOut {}

pub fn evaluate(s: &Settings) -> CliResult<KernelOut> {
    let dim = resolve_dim(s, &["q0", "qf"], 1)?;
    let params = model_params(s, system_omega(s)?, dim)?;
    let e = endpoints(s, dim)?;
    let k = if params.is_free() { free_kernel(&params, &e)? } else { kernel(&params, &e)? };
    Ok(KernelOut::from(&k))
}
