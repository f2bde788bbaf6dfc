//! Finite-difference residual of `[i hbar d/dT - H] K` with
//! `H = -(hbar^2 / 2m) lap + (alpha hbar^4 / m) lap^2 + (m omega^2 / 2) |qf|^2`
//! acting on the final point.
//!
//! Stencils: fourth-order five-point second derivatives, the seven-point
//! fourth-order fourth derivative on each axis, tensor products of the
//! five-point stencil for the mixed `d_i^2 d_j^2` terms, and one Richardson
//! level on the central time difference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{kernel_with, PrefactorSpec};
use crate::model::{Endpoints, ModelParams, VecD, C64, I};

use super::ResidualReport;

const SECOND: [(i32, f64); 5] = [(-2, -1.0 / 12.0), (-1, 16.0 / 12.0), (0, -30.0 / 12.0), (1, 16.0 / 12.0), (2, -1.0 / 12.0)];
const FOURTH: [(i32, f64); 7] = [
    (-3, -1.0 / 6.0),
    (-2, 2.0),
    (-1, -13.0 / 2.0),
    (0, 28.0 / 3.0),
    (1, -13.0 / 2.0),
    (2, 2.0),
    (3, -1.0 / 6.0),
];

/// Step sizes for the spatial and time differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdSteps {
    pub h_laplacian: f64,
    pub h_biharmonic: f64,
    /// Step in the time magnitude (`T` or `tau`).
    pub h_time: f64,
}

impl FdSteps {
    /// Steps scaled to the shortest length and time over which the kernel
    /// varies at these endpoints.
    pub fn for_system(params: &ModelParams, e: &Endpoints) -> Self {
        let (m, hbar, w) = (params.m, params.hbar, params.omega);
        let t = e.time.value();
        let (width, gradient, period) = if params.is_free() {
            let dq = &e.qf - &e.q0;
            ((hbar * t.norm() / m).sqrt(), m * dq.norm_sq().sqrt() / (hbar * t.norm()), t.norm())
        } else {
            let s = (t * w).sin().norm();
            let c = (t * w).cos();
            let g: f64 = e.qf.iter().zip(e.q0.iter()).map(|(&f, &z)| (c * f - z).norm_sqr()).sum::<f64>().sqrt();
            ((hbar * s / (m * w)).sqrt(), m * w * g / (hbar * s), t.norm().min(1.0 / w))
        };
        let length = 1.0 / (1.0 / width + gradient);
        let time = period * (length / width).powi(2);
        Self { h_laplacian: 0.01 * length, h_biharmonic: 0.04 * length, h_time: 2e-3 * time }
    }

    fn validate(&self) -> Result<()> {
        for h in [self.h_laplacian, self.h_biharmonic, self.h_time] {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::InvalidParameter(format!("finite-difference steps must be > 0, got {h}")));
            }
        }
        Ok(())
    }
}

struct Sampler<'a> {
    params: ModelParams,
    e: &'a Endpoints,
    spec: PrefactorSpec,
}

impl Sampler<'_> {
    fn at(&self, qf: &[f64], time: f64) -> Result<C64> {
        let e = Endpoints::new(self.e.q0.clone(), VecD::from(qf.to_vec()), self.e.time.with_magnitude(time)?)?;
        Ok(kernel_with(&self.params, &e, &self.spec)?.amplitude)
    }

    fn shifted(&self, moves: &[(usize, f64)]) -> Result<C64> {
        let mut q = self.e.qf.to_vec();
        for &(axis, d) in moves {
            q[axis] += d;
        }
        self.at(&q, self.e.time.magnitude())
    }

    fn laplacian(&self, h: f64) -> Result<C64> {
        let mut acc = C64::default();
        for axis in 0..self.e.dim() {
            for &(k, c) in &SECOND {
                acc += self.shifted(&[(axis, k as f64 * h)])? * c;
            }
        }
        Ok(acc / (h * h))
    }

    fn biharmonic(&self, h: f64) -> Result<C64> {
        let dim = self.e.dim();
        let mut acc = C64::default();
        for axis in 0..dim {
            for &(k, c) in &FOURTH {
                acc += self.shifted(&[(axis, k as f64 * h)])? * c;
            }
        }
        for i in 0..dim {
            for j in i + 1..dim {
                for &(ki, ci) in &SECOND {
                    for &(kj, cj) in &SECOND {
                        acc += self.shifted(&[(i, ki as f64 * h), (j, kj as f64 * h)])? * (2.0 * ci * cj);
                    }
                }
            }
        }
        Ok(acc / h.powi(4))
    }

    /// `dK/dT`, from a Richardson-extrapolated central difference in the
    /// time magnitude `s` with `dT/ds` equal to 1 (real) or `-i` (Euclidean).
    fn time_derivative(&self, h: f64) -> Result<C64> {
        let s = self.e.time.magnitude();
        let q = self.e.qf.to_vec();
        let central = |step: f64| -> Result<C64> { Ok((self.at(&q, s + step)? - self.at(&q, s - step)?) / (2.0 * step)) };
        let ds = (4.0 * central(h / 2.0)? - central(h)?) / 3.0;
        let dt_ds = self.e.time.value() / s;
        Ok(ds / dt_ds)
    }

    /// `([i hbar d/dT - H] K, K)`.
    fn residual(&self, steps: &FdSteps) -> Result<(C64, C64)> {
        let p = &self.params;
        let k = self.shifted(&[])?;
        let kinetic = -(p.hbar * p.hbar) / (2.0 * p.m) * self.laplacian(steps.h_laplacian)?;
        let quartic = if p.alpha == 0.0 {
            C64::default()
        } else {
            p.alpha * p.hbar.powi(4) / p.m * self.biharmonic(steps.h_biharmonic)?
        };
        let potential = 0.5 * p.m * p.omega * p.omega * self.e.qf.norm_sq() * k;
        let lhs = I * p.hbar * self.time_derivative(steps.h_time)?;
        Ok((lhs - kinetic - quartic - potential, k))
    }
}

/// Residual at `alpha`, at `alpha / 2` and at `alpha = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchrodingerReport {
    #[serde(flatten)]
    pub report: ResidualReport,
    /// Relative residual at `alpha / 2`.
    pub half_alpha_relative: f64,
    /// Relative residual at `alpha = 0`, the finite-difference floor.
    pub floor_relative: f64,
}

impl SchrodingerReport {
    pub fn relative(&self) -> f64 {
        self.report.relative()
    }
}

/// Relative residual `|[i hbar d/dT - H] K| / |K|` of the full first-order
/// amplitude. The scaling ratio compares the alpha-dependent part
/// `R(alpha) - R(0)` at `alpha` and `alpha / 2`.
pub fn schrodinger_residual(params: &ModelParams, e: &Endpoints, steps: &FdSteps) -> Result<SchrodingerReport> {
    e.check_dim(params.dim)?;
    steps.validate()?;
    let spec = PrefactorSpec::canonical(params.dim);
    let eval = |alpha: f64| Sampler { params: params.with_alpha(alpha), e, spec }.residual(steps);
    let (full, k) = eval(params.alpha)?;
    let (half, k_half) = eval(params.alpha / 2.0)?;
    let (floor, k_floor) = eval(0.0)?;
    let mut report = ResidualReport::new(full.norm(), k.norm(), params.alpha);
    if params.alpha != 0.0 {
        report.scaling_ratio = Some((full - floor).norm() / (half - floor).norm());
    }
    Ok(SchrodingerReport {
        report,
        half_alpha_relative: half.norm() / k_half.norm(),
        floor_relative: floor.norm() / k_floor.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TimeArg;

    fn ends(dim: usize, time: TimeArg) -> Endpoints {
        let q0 = [0.3, -0.2, 0.1][..dim].to_vec();
        let qf = [0.5, 0.4, -0.3][..dim].to_vec();
        Endpoints::new(q0.into(), qf.into(), time).unwrap()
    }

    #[test]
    fn exact_kernels_leave_only_the_difference_floor() {
        for dim in 1..=3 {
            for omega in [0.0, 1.0] {
                let p = ModelParams::new(1.0, 1.0, omega, 0.0, dim).unwrap();
                let e = ends(dim, TimeArg::real(1.0).unwrap());
                let r = schrodinger_residual(&p, &e, &FdSteps::for_system(&p, &e)).unwrap();
                assert!(r.relative() <= 1e-7, "D={dim} omega={omega}: {}", r.relative());
                let e = ends(dim, TimeArg::euclidean(1.0).unwrap());
                let r = schrodinger_residual(&p, &e, &FdSteps::for_system(&p, &e)).unwrap();
                assert!(r.relative() <= 1e-7, "euclidean D={dim} omega={omega}: {}", r.relative());
            }
        }
    }

    #[test]
    fn residual_is_second_order_in_alpha() {
        for dim in 1..=3 {
            for (omega, t) in [(0.0, 3.0), (0.5, 3.0)] {
                let p = ModelParams::new(1.0, 1.0, omega, 1e-3, dim).unwrap();
                let e = ends(dim, TimeArg::real(t).unwrap());
                let r = schrodinger_residual(&p, &e, &FdSteps::for_system(&p, &e)).unwrap();
                let ratio = r.report.scaling_ratio.unwrap();
                assert!(r.relative() <= 1e-4, "D={dim} omega={omega}: {}", r.relative());
                assert!((3.6..=4.4).contains(&ratio), "D={dim} omega={omega}: ratio {ratio}");
            }
        }
    }

    #[test]
    fn rejects_bad_steps() {
        let p = ModelParams::new(1.0, 1.0, 0.0, 0.0, 1).unwrap();
        let e = ends(1, TimeArg::real(1.0).unwrap());
        let steps = FdSteps { h_laplacian: 0.0, h_biharmonic: 0.1, h_time: 0.1 };
        assert!(schrodinger_residual(&p, &e, &steps).is_err());
    }
}
