//! Numerical checks of the first-order kernels: composition, the
//! Schrodinger equation, the initial condition, and alpha^2 scaling.

pub mod composition;
pub mod delta;
pub mod schrodinger;
pub mod suite;
pub mod tolerances;

use serde::{Deserialize, Serialize};

pub use composition::{
    composition_check_analytic, composition_check_quadrature, composition_check_quadrature_with, delta_s, delta_s_2d,
    delta_s_moments, CompositionSplit,
};
pub use delta::{delta_limit_check, DeltaReport, TestFunction};
pub use schrodinger::{schrodinger_residual, FdSteps, SchrodingerReport};
pub use suite::{run_suite, Bound, Check, SuiteKind, SuiteReport, TrialRecord, VerifyConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub residual_norm: f64,
    pub reference_norm: f64,
    pub alpha_used: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaling_ratio: Option<f64>,
}

impl ResidualReport {
    pub fn new(residual_norm: f64, reference_norm: f64, alpha_used: f64) -> Self {
        Self { residual_norm, reference_norm, alpha_used, scaling_ratio: None }
    }

    /// `residual_norm / reference_norm`.
    pub fn relative(&self) -> f64 {
        self.residual_norm / self.reference_norm
    }
}
