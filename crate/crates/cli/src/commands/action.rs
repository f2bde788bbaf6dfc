use clap::Args;
use gupqm::algebra::PairInvariants;
use gupqm::classical::action_terms;
use gupqm::C64;
use serde::{Deserialize, Serialize};

use super::kernel::KernelArgs;
use super::{endpoints, model_params, resolve_dim, system_omega, CommandSpec, FlagList, Report};
use crate::error::CliResult;
use crate::output::{Cx, Format, Tabular};
use crate::settings::Settings;

pub const SPEC: CommandSpec = CommandSpec {
    name: "action",
    keys: super::kernel::SPEC.keys,
    sweepable: super::kernel::SPEC.sweepable,
    default_format: Format::Json,
};

#[derive(Args, Debug, Default)]
pub struct ActionArgs {
    #[command(flatten)]
    pub inner: KernelArgs,
}

impl ActionArgs {
    pub fn flags(&self, out: &mut FlagList) {
        self.inner.flags(out);
    }
}

/// Classical action orders and their sum `S0 + alpha S1`; complex in Euclidean time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionOut {
    #[serde(rename = "S0")]
    pub s0: Cx,
    #[serde(rename = "S1")]
    pub s1: Cx,
    pub total: Cx,
}

impl Tabular for ActionOut {
    fn header() -> Vec<&'static str> {
        vec!["S0_re", "S0_im", "S1_re", "S1_im", "total_re", "total_im"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![[self.s0, self.s1, self.total].iter().flat_map(Cx::cells).collect()]
    }
}

impl Report for ActionOut {}

pub fn evaluate(s: &Settings) -> CliResult<ActionOut> {
    let dim = resolve_dim(s, &["q0", "qf"], 1)?;
    let params = model_params(s, system_omega(s)?, dim)?;
    let e = endpoints(s, dim)?;
    let (s0, s1): (C64, C64) = action_terms(&params, &PairInvariants::of(&e.q0, &e.qf), e.time.value())?;
    Ok(ActionOut { s0: s0.into(), s1: s1.into(), total: (s0 + s1 * params.alpha).into() })
}
