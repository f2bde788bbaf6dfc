//! Pass thresholds shared by the checks, the suites and the CLI.

/// Composition residual with the canonical prefactor (exact integration).
pub const COMPOSITION_ANALYTIC: f64 = 1e-10;
/// Smallest composition residual accepted as a failure of a perturbed prefactor.
pub const COMPOSITION_PERTURBED_MIN: f64 = 1e-5;
/// Size of the prefactor perturbation in the negative control.
pub const PREFACTOR_PERTURBATION: f64 = 0.1;
/// Alpha used by the negative control.
pub const PERTURBED_ALPHA: f64 = 1e-3;
/// Composition residual with tensor Gauss-Hermite quadrature (64 nodes per axis).
pub const COMPOSITION_QUADRATURE: f64 = 1e-6;
/// Relative Schrodinger residual at alpha = 1e-3.
pub const SCHRODINGER_RELATIVE: f64 = 1e-4;
/// Window for `residual(alpha) / residual(alpha / 2)`.
pub const ALPHA_SCALING: (f64, f64) = (3.6, 4.4);
/// Deviation from the test function at `tau = 1e-3`.
pub const DELTA_DEVIATION: f64 = 1e-3;
/// Window for `deviation(tau) / deviation(tau / 2)`.
pub const TAU_HALVING: (f64, f64) = (1.7, 2.3);
/// Closed moments against Gauss-Hermite quadrature.
pub const MOMENT_ORACLE: f64 = 1e-10;
/// Moment engine against the closed moments.
pub const MOMENT_ENGINE: f64 = 1e-12;
