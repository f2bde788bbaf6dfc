//! Energy-dependent Green's function of the free particle as the Laplace
//! transform of the Euclidean propagator,
//! `G(eps) = int_0^inf dtau exp(-eps tau) K(T = -i tau)`.
//!
//! With this measure the two-dimensional transform is, to first order,
//! `(m / pi hbar)[(1 + 8 alpha hbar m eps) K_0(z) - 2 alpha hbar m eps z K_1(z)]`
//! with `z = sqrt(2 m eps / hbar) |dq|`.

pub mod bessel;

use serde::{Deserialize, Serialize};

pub use bessel::{bessel_k, bessel_k0, bessel_k1};

use crate::error::{Error, Result};
use crate::kernels::free_kernel;
use crate::model::{displacement, Endpoints, ModelParams, TimeArg, VecD};
use crate::quadrature::integrate_adaptive;

const LAPLACE_REL_TOL: f64 = 1e-12;
const LAPLACE_MAX_INTERVALS: usize = 4000;
/// Exponent beyond which the integrand is treated as zero.
const TAIL_EXPONENT: f64 = 745.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenQuery {
    pub epsilon: f64,
    pub q0: VecD,
    pub qf: VecD,
    pub params: ModelParams,
}

impl GreenQuery {
    pub fn new(params: ModelParams, q0: VecD, qf: VecD, epsilon: f64) -> Result<Self> {
        params.validate()?;
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!("epsilon must be > 0, got {epsilon}")));
        }
        if q0.dim() != params.dim || qf.dim() != params.dim {
            return Err(Error::DimensionMismatch { expected: params.dim, got: q0.dim().max(qf.dim()) });
        }
        Ok(Self { epsilon, q0, qf, params })
    }

    fn separation(&self) -> Result<f64> {
        let r = (&self.qf - &self.q0).norm_sq().sqrt();
        if r == 0.0 {
            return Err(Error::OutOfDomain("coincident endpoints: the Green's function diverges".into()));
        }
        Ok(r)
    }

    /// `sqrt(2 m eps / hbar) |dq|`.
    pub fn bessel_argument(&self) -> Result<f64> {
        let p = &self.params;
        Ok((2.0 * p.m * self.epsilon / p.hbar).sqrt() * self.separation()?)
    }

    /// `alpha hbar m eps`, the size of the first-order correction.
    pub fn correction_size(&self) -> f64 {
        self.params.alpha * self.params.hbar * self.params.m * self.epsilon
    }
}

/// Closed-form two-dimensional free Green's function.
pub fn green_free_2d_closed(g: &GreenQuery) -> Result<f64> {
    if g.params.dim != 2 {
        return Err(Error::InvalidParameter(format!("the closed form is two-dimensional, got D = {}", g.params.dim)));
    }
    let z = g.bessel_argument()?;
    let p = &g.params;
    let x = g.correction_size();
    let lead = p.m / (std::f64::consts::PI * p.hbar);
    Ok(lead * ((1.0 + 8.0 * x) * bessel_k0(z)? - 2.0 * x * z * bessel_k1(z)?))
}

/// Euclidean free propagator truncated at first order in alpha.
pub fn euclidean_free_integrand(params: &ModelParams, q0: &VecD, qf: &VecD, tau: f64) -> Result<f64> {
    let e = Endpoints::new(q0.clone(), qf.clone(), TimeArg::euclidean(tau)?)?;
    Ok(free_kernel(&params.with_omega(0.0), &e)?.linearized().re)
}

/// Laplace transform of the first-order Euclidean free propagator by
/// quadrature, in any dimension.
///
/// Uses `tau = exp(u)`, which makes both tails decay doubly exponentially,
/// and splits at the peak `tau* = sqrt(c / eps)` of
/// `exp(-eps tau - c / tau)`, `c = m |dq|^2 / 2 hbar`.
pub fn laplace_numeric(params: &ModelParams, q0: &VecD, qf: &VecD, epsilon: f64) -> Result<f64> {
    let g = GreenQuery::new(*params, q0.clone(), qf.clone(), epsilon)?;
    let e = Endpoints::new(q0.clone(), qf.clone(), TimeArg::euclidean(1.0)?)?;
    let (_, sep) = displacement(&e)?;
    g.separation()?;
    let c = params.m * sep / (2.0 * params.hbar);
    let peak = (c / epsilon).sqrt();
    let lo = (c / TAIL_EXPONENT).ln();
    let hi = (TAIL_EXPONENT / epsilon).ln();
    let mid = peak.ln();
    let integrand = |u: f64| {
        let tau = u.exp();
        let arg = epsilon * tau;
        if arg > TAIL_EXPONENT || c / tau > TAIL_EXPONENT {
            return 0.0;
        }
        match euclidean_free_integrand(params, q0, qf, tau) {
            Ok(k) => tau * (-arg).exp() * k,
            Err(_) => f64::NAN,
        }
    };
    let mut total = 0.0;
    for (a, b) in [(lo, mid), (mid, hi)] {
        if b > a {
            total += integrate_adaptive(&integrand, a, b, 0.0, LAPLACE_REL_TOL, LAPLACE_MAX_INTERVALS)?.value;
        }
    }
    if !total.is_finite() {
        return Err(Error::NonConvergent("laplace transform produced a non-finite value".into()));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(alpha: f64) -> ModelParams {
        ModelParams::new(1.0, 1.0, 0.0, alpha, 2).unwrap()
    }

    fn query(alpha: f64, eps: f64, r: f64) -> GreenQuery {
        GreenQuery::new(params(alpha), VecD::from([0.0, 0.0]), VecD::from([r, 0.0]), eps).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let g = green_free_2d_closed(&query(0.0, 0.5, 1.0)).unwrap();
        assert!((g - 0.134_016_24).abs() < 1e-8, "{g}");
        assert!((g - bessel_k0(1.0).unwrap() / PI).abs() < 1e-16);
        let coincident = GreenQuery::new(params(0.0), VecD::from([0.3, 0.3]), VecD::from([0.3, 0.3]), 1.0).unwrap();
        assert!(green_free_2d_closed(&coincident).is_err());
        assert!(GreenQuery::new(params(0.0), VecD::from([0.0, 0.0]), VecD::from([1.0, 0.0]), 0.0).is_err());
    }

    #[test]
    fn numeric_matches_closed_form() {
        for (alpha, eps, r) in [(0.0, 0.5, 1.0), (0.001, 1.0, 1.0), (0.002, 2.0, 0.5), (0.01, 1.0, 2.0)] {
            let q = query(alpha, eps, r);
            let closed = green_free_2d_closed(&q).unwrap();
            let numeric = laplace_numeric(&q.params, &q.q0, &q.qf, eps).unwrap();
            assert!((numeric / closed - 1.0).abs() < 1e-9, "{alpha} {eps} {r}: {numeric} {closed}");
        }
    }

    #[test]
    fn convention_holds_for_other_units() {
        let p = ModelParams::new(1.7, 0.6, 0.0, 0.003, 2).unwrap();
        let q = GreenQuery::new(p, VecD::from([0.1, -0.2]), VecD::from([0.5, 0.4]), 0.8).unwrap();
        let closed = green_free_2d_closed(&q).unwrap();
        let numeric = laplace_numeric(&p, &q.q0, &q.qf, 0.8).unwrap();
        assert!((numeric / closed - 1.0).abs() < 1e-9, "{numeric} {closed}");
    }

    #[test]
    fn heat_kernel_is_positive() {
        for tau in [1e-3, 0.1, 1.0, 10.0, 100.0] {
            let k = euclidean_free_integrand(&params(0.0), &VecD::from([0.0, 0.0]), &VecD::from([1.0, 0.0]), tau).unwrap();
            assert!(k > 0.0);
        }
    }

    #[test]
    fn decreases_with_separation() {
        let values: Vec<f64> = [0.25, 0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&r| green_free_2d_closed(&query(0.0, 1.0, r)).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
    }
}
