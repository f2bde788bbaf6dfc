//! Initial condition: `int d^D q0 K(qf, q0; -i tau) g(q0) -> g(qf)` as
//! `tau -> 0`, evaluated exactly with the moment engine on the first-order
//! Euclidean kernel.

use serde::{Deserialize, Serialize};

use crate::algebra::{FreeSlot, PairInvariants};
use crate::classical::{action_terms, quadratic_action_coeffs};
use crate::error::{Error, Result};
use crate::kernels::{leading_prefactor, prefactor_terms, PrefactorSpec};
use crate::model::{ModelParams, VecD, C64, I};
use crate::moments::{gaussian_expectation, GaussianWeight};

use super::ResidualReport;

/// Test function smeared against the kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum TestFunction {
    /// `(2 pi w^2)^{-D/2} exp(-|q - center|^2 / 2 w^2)`.
    Gaussian { center: VecD, width: f64 },
    /// `g = 1`.
    Constant,
}

impl TestFunction {
    pub fn value(&self, q: &VecD) -> f64 {
        match self {
            TestFunction::Constant => 1.0,
            TestFunction::Gaussian { center, width } => {
                let r2 = (q - center).norm_sq();
                let d = q.dim() as f64;
                (2.0 * std::f64::consts::PI * width * width).powf(-d / 2.0) * (-r2 / (2.0 * width * width)).exp()
            }
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if let TestFunction::Gaussian { center, width } = self {
            if center.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: center.dim() });
            }
            if !(*width > 0.0) || !width.is_finite() {
                return Err(Error::InvalidParameter(format!("test function width must be > 0, got {width}")));
            }
        }
        Ok(())
    }
}

/// `int d^D q0 K(qf, q0; -i tau) g(q0)` split as `leading + alpha * first`.
pub fn smeared_kernel(params: &ModelParams, qf: &VecD, g: &TestFunction, tau: f64) -> Result<(C64, C64)> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("tau must be > 0, got {tau}")));
    }
    if qf.dim() != params.dim {
        return Err(Error::DimensionMismatch { expected: params.dim, got: qf.dim() });
    }
    g.validate(params.dim)?;
    let t = C64::new(0.0, -tau);
    let hbar = params.hbar;
    let (a_act, b_act) = quadratic_action_coeffs(params, t)?;
    // i S_0 / hbar = i (A (|q0|^2 + |qf|^2) - B q0.qf) / hbar
    let mut a = -I * a_act / hbar;
    let mut b: Vec<C64> = qf.iter().map(|&x| -I * b_act * x / (2.0 * hbar)).collect();
    let mut constant = I * a_act * qf.norm_sq() / hbar;
    let mut norm = C64::new(1.0, 0.0);
    if let TestFunction::Gaussian { center, width } = g {
        let s = 1.0 / (2.0 * width * width);
        a += s;
        for (bi, &c) in b.iter_mut().zip(center.iter()) {
            *bi += s * c;
        }
        constant -= s * center.norm_sq();
        norm = (2.0 * std::f64::consts::PI * width * width).powf(-(params.dim as f64) / 2.0).into();
    }
    let w = GaussianWeight::new(a, b)?;
    let leading = leading_prefactor(params, t)? * norm * (constant + w.exponent()).exp() * w.volume_factor();

    let inv = PairInvariants::with_variable(qf, FreeSlot::Initial);
    let f = prefactor_terms(params, &PrefactorSpec::canonical(params.dim), &inv, t)?;
    let (_, s1) = action_terms(params, &inv, t)?;
    let first = leading * gaussian_expectation(&(f + s1 * (I / hbar)), &w)?;
    Ok((leading, first))
}

/// Deviation from the test function at `tau` and `tau / 2`, and the kernel
/// normalization `int d^D q0 K` at `tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    #[serde(flatten)]
    pub report: ResidualReport,
    pub tau: f64,
    /// `deviation(tau) / deviation(tau / 2)`; 2 for a linear approach.
    pub halving_ratio: f64,
    /// `(smeared(tau) - smeared(tau / 2)) / (tau / 2)`.
    pub tau_slope: f64,
    /// `int d^D q0 K(qf, q0; -i tau)` to first order in alpha.
    pub normalization: C64,
    /// Its first-order part, `0` up to `O(tau)` for a normalized kernel.
    pub normalization_first_order: C64,
}

impl DeltaReport {
    pub fn relative(&self) -> f64 {
        self.report.relative()
    }
}

pub fn delta_limit_check(params: &ModelParams, qf: &VecD, g: &TestFunction, tau: f64) -> Result<DeltaReport> {
    let target = g.value(qf);
    let value = |t: f64| -> Result<C64> {
        let (lead, first) = smeared_kernel(params, qf, g, t)?;
        Ok(lead + first * params.alpha)
    };
    let full = value(tau)?;
    let half = value(tau / 2.0)?;
    let deviation = (full - target).norm();
    let (n_lead, n_first) = smeared_kernel(params, qf, &TestFunction::Constant, tau)?;
    Ok(DeltaReport {
        report: ResidualReport::new(deviation, target.abs(), params.alpha),
        tau,
        halving_ratio: deviation / (half - target).norm(),
        tau_slope: (full - half).re / (tau / 2.0),
        normalization: n_lead + n_first * params.alpha,
        normalization_first_order: n_first,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_at(q: &VecD) -> TestFunction {
        TestFunction::Gaussian { center: q.clone(), width: 1.0 }
    }

    #[test]
    fn heat_kernel_family() {
        let qf = VecD::from([0.4]);
        let p = ModelParams::new(1.0, 1.0, 0.0, 0.0, 1).unwrap();
        let r = delta_limit_check(&p, &qf, &gaussian_at(&qf), 1e-3).unwrap();
        assert!(r.report.residual_norm <= 1e-3);
        assert!((r.halving_ratio - 2.0).abs() < 0.3, "{}", r.halving_ratio);
        // Heat flow on a unit Gaussian: d/dtau at the peak is -(D/2) hbar/m g.
        let peak = (2.0 * std::f64::consts::PI).powf(-0.5);
        assert!((r.tau_slope / peak + 0.5).abs() < 1e-3, "{}", r.tau_slope);
    }

    #[test]
    fn kernel_normalization() {
        for dim in 1..=3 {
            let qf = VecD::from(vec![0.3; dim]);
            let free = ModelParams::new(1.0, 1.0, 0.0, 1e-3, dim).unwrap();
            let r = delta_limit_check(&free, &qf, &TestFunction::Constant, 1e-3).unwrap();
            // The first-order part cancels between terms of size D(D+2) hbar m / tau.
            let scale = (dim * (dim + 2)) as f64 / 1e-3;
            assert!(r.normalization_first_order.norm() < 1e-11 * scale, "{}", r.normalization_first_order);
            assert!((r.normalization - 1.0).norm() < 1e-10, "{}", r.normalization);
            let sho = free.with_omega(1.0);
            let a = delta_limit_check(&sho, &qf, &TestFunction::Constant, 1e-3).unwrap();
            let b = delta_limit_check(&sho, &qf, &TestFunction::Constant, 5e-4).unwrap();
            let ratio = (a.normalization - 1.0).norm() / (b.normalization - 1.0).norm();
            assert!((a.normalization - 1.0).norm() < 1e-3 && (ratio - 2.0).abs() < 0.1, "{ratio}");
        }
    }

    #[test]
    fn first_order_deviation_is_linear_in_tau() {
        for dim in 1..=3 {
            for omega in [0.0, 1.0] {
                let qf = VecD::from(vec![0.2; dim]);
                let p = ModelParams::new(1.0, 1.0, omega, 1e-3, dim).unwrap();
                let g = TestFunction::Gaussian { center: VecD::from(vec![0.1; dim]), width: 1.0 };
                let r = delta_limit_check(&p, &qf, &g, 1e-3).unwrap();
                assert!(r.report.residual_norm <= 1e-3);
                assert!((r.halving_ratio - 2.0).abs() < 0.3, "D={dim}: {}", r.halving_ratio);
            }
        }
    }

    #[test]
    fn argument_errors() {
        let p = ModelParams::new(1.0, 1.0, 0.0, 0.0, 2).unwrap();
        let qf = VecD::from([0.0, 0.0]);
        assert!(delta_limit_check(&p, &qf, &TestFunction::Constant, 0.0).is_err());
        assert!(delta_limit_check(&p, &VecD::from([0.0]), &TestFunction::Constant, 1e-3).is_err());
        let bad = TestFunction::Gaussian { center: qf.clone(), width: -1.0 };
        assert!(delta_limit_check(&p, &qf, &bad, 1e-3).is_err());
    }
}
