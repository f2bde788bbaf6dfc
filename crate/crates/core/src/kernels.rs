//! Closed-form first-order propagators
//! `K = L (1 + alpha f) exp(i (S_0 + alpha S_1) / hbar)`
//! for the free particle and the oscillator in `D` dimensions, at real or
//! Euclidean time.

use serde::{Deserialize, Serialize};

use crate::algebra::{PairInvariants, Ring};
use crate::classical::{action_terms, checked_sin};
use crate::error::{Error, Result};
use crate::model::{displacement, principal_pow, Endpoints, ModelParams, C64, I};
use crate::moments::{gaussian_expectation, GaussianWeight};
use crate::poly::MultiPoly;

/// Below this `|omega T|` the wrapper [`kernel`] uses the free form.
pub const CROSSOVER_OMEGA_T: f64 = 1e-6;

/// Coefficients of the first-order prefactor ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrefactorSpec {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

impl PrefactorSpec {
    /// `beta1 = D(D+2)/8`, `beta2 = -(D+2)/8`, `beta3 = 1`.
    pub fn canonical(dim: usize) -> Self {
        let d = dim as f64;
        Self { beta1: d * (d + 2.0) / 8.0, beta2: -(d + 2.0) / 8.0, beta3: 1.0 }
    }

    pub fn is_canonical(&self, dim: usize) -> bool {
        *self == Self::canonical(dim)
    }
}

/// Prefactor `f` as a function of the endpoint invariants at complex time `t`.
///
/// For `omega = 0` this is the limit `8 beta1 i hbar m / T + 16 beta2 m^2 |dq|^2 / T^2`.
pub fn prefactor_terms<R: Ring>(
    params: &ModelParams,
    spec: &PrefactorSpec,
    inv: &PairInvariants<R>,
    t: C64,
) -> Result<R> {
    if t == C64::default() {
        return Err(Error::ZeroTime);
    }
    let (m, hbar) = (params.m, params.hbar);
    if params.is_free() {
        let constant = I * (8.0 * spec.beta1 * hbar * m) / t;
        let quad = inv.separation_sq() * (16.0 * spec.beta2 * m * m / (t * t));
        return Ok(quad + inv.n0.constant_like(constant));
    }
    let w = params.omega;
    let s = checked_sin(w, t)?;
    let th = t * w;
    let c = th.cos();
    let c2 = (th * 2.0).cos();
    let first = I * (spec.beta1 * hbar * m * w) / (s * s) * (th * 2.0 + s * c * 5.0 + th * c2);
    let n = inv.norm_sum();
    let d = inv.dot.clone();
    let secular = n.clone() * (th * c * 6.0) - d.clone() * (th * (c2 + 2.0) * 4.0);
    let oscillating = n.clone() * (s * 10.0) - d * (s * c * 20.0);
    let cubic = n * (s * s * s * (-6.0 * spec.beta3));
    let second = (secular + oscillating + cubic) * (spec.beta2 * m * m * w * w / (s * s * s));
    Ok(second + inv.n0.constant_like(first))
}

/// Oscillator prefactor `f` for the given endpoints.
pub fn sho_prefactor(params: &ModelParams, e: &Endpoints, spec: &PrefactorSpec) -> Result<C64> {
    e.check_dim(params.dim)?;
    if params.is_free() {
        return Err(Error::InvalidParameter("sho_prefactor needs omega > 0".into()));
    }
    prefactor_terms(params, spec, &PairInvariants::of(&e.q0, &e.qf), e.time.value())
}

/// A propagator value split into its first-order factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub amplitude: C64,
    pub leading_prefactor: C64,
    #[serde(rename = "f")]
    pub f_alpha: C64,
    #[serde(rename = "S0")]
    pub s0: C64,
    #[serde(rename = "S1")]
    pub s1: C64,
    pub params: ModelParams,
    pub endpoints: Endpoints,
}

impl KernelValue {
    pub fn assemble(params: &ModelParams, e: &Endpoints, leading: C64, f: C64, s0: C64, s1: C64) -> Self {
        let a = params.alpha;
        let amplitude = leading * (1.0 + f * a) * (I * (s0 + s1 * a) / params.hbar).exp();
        Self {
            amplitude,
            leading_prefactor: leading,
            f_alpha: f,
            s0,
            s1,
            params: *params,
            endpoints: e.clone(),
        }
    }

    /// `L exp(i S_0 / hbar) (1 + alpha (f + i S_1 / hbar))`, the amplitude
    /// truncated at first order in `alpha`.
    pub fn linearized(&self) -> C64 {
        self.leading_order() * (1.0 + self.first_order_coefficient() * self.params.alpha)
    }

    /// `L exp(i S_0 / hbar)`.
    pub fn leading_order(&self) -> C64 {
        self.leading_prefactor * (I * self.s0 / self.params.hbar).exp()
    }

    /// `f + i S_1 / hbar`.
    pub fn first_order_coefficient(&self) -> C64 {
        self.f_alpha + I * self.s1 / self.params.hbar
    }

    /// `|amplitude - L (1 + alpha f) exp(i (S_0 + alpha S_1) / hbar)|`.
    pub fn decomposition_defect(&self) -> f64 {
        let a = self.params.alpha;
        let rebuilt = self.leading_prefactor
            * (1.0 + self.f_alpha * a)
            * (I * (self.s0 + self.s1 * a) / self.params.hbar).exp();
        (self.amplitude - rebuilt).norm()
    }
}

fn check_time(e: &Endpoints) -> Result<C64> {
    let t = e.time.value();
    if t == C64::default() {
        return Err(Error::ZeroTime);
    }
    Ok(t)
}

/// `(m / (2 pi i hbar T))^{D/2}`.
pub fn free_leading_prefactor(params: &ModelParams, t: C64) -> C64 {
    let z = params.m / (2.0 * std::f64::consts::PI * I * params.hbar * t);
    principal_pow(z, params.dim as f64 / 2.0)
}

/// `(m omega / (2 pi i hbar sin(omega T)))^{D/2}`.
pub fn sho_leading_prefactor(params: &ModelParams, t: C64) -> Result<C64> {
    let s = checked_sin(params.omega, t)?;
    let z = params.m * params.omega / (2.0 * std::f64::consts::PI * I * params.hbar * s);
    Ok(principal_pow(z, params.dim as f64 / 2.0))
}

/// Leading prefactor of the free or oscillator kernel, by `params.omega`.
pub fn leading_prefactor(params: &ModelParams, t: C64) -> Result<C64> {
    if params.is_free() {
        Ok(free_leading_prefactor(params, t))
    } else {
        sho_leading_prefactor(params, t)
    }
}

/// Free-particle propagator in closed form. `params.omega` is ignored.
pub fn free_kernel(params: &ModelParams, e: &Endpoints) -> Result<KernelValue> {
    free_kernel_with(params, e, &PrefactorSpec::canonical(params.dim))
}

/// Free-particle propagator with an arbitrary prefactor ansatz.
pub fn free_kernel_with(params: &ModelParams, e: &Endpoints, spec: &PrefactorSpec) -> Result<KernelValue> {
    e.check_dim(params.dim)?;
    let t = check_time(e)?;
    let free = params.with_omega(0.0);
    let inv = PairInvariants::of(&e.q0, &e.qf);
    let (s0, s1) = action_terms(&free, &inv, t)?;
    let f = prefactor_terms(&free, spec, &inv, t)?;
    Ok(KernelValue::assemble(params, e, free_leading_prefactor(params, t), f, s0, s1))
}

/// Free or oscillator kernel, by `params.omega`, with the given ansatz and
/// no crossover switch.
pub fn kernel_with(params: &ModelParams, e: &Endpoints, spec: &PrefactorSpec) -> Result<KernelValue> {
    if params.is_free() {
        free_kernel_with(params, e, spec)
    } else {
        sho_kernel_with(params, e, spec)
    }
}

/// Free-particle propagator built from plane waves.
///
/// `K = int d^D k / (2 pi)^D exp(i k.dq - i hbar |k|^2 T / 2m) (1 - i alpha hbar^3 |k|^4 T / m)`
/// is a Gaussian moment with `a = i hbar T / 2m` and `b = i dq / 2`. The
/// first-order coefficient `f + i S_1 / hbar` is a polynomial in `|dq|^2`;
/// its quartic part is `i S_1 / hbar` and the rest is `f`.
pub fn free_kernel_spectral(params: &ModelParams, e: &Endpoints) -> Result<KernelValue> {
    e.check_dim(params.dim)?;
    let t = check_time(e)?;
    let (dq, _) = displacement(e)?;
    let (m, hbar, dim) = (params.m, params.hbar, params.dim);
    let a = I * hbar * t / (2.0 * m);
    let k4 = {
        let k2 = MultiPoly::norm_sq(dim);
        &k2 * &k2
    };
    let first_order = |scale: f64| -> Result<(GaussianWeight, C64)> {
        let b = dq.iter().map(|x| I * (scale * x / 2.0)).collect();
        let w = GaussianWeight::new(a, b)?;
        let c = -I * hbar.powi(3) * t / m * gaussian_expectation(&k4, &w)?;
        Ok((w, c))
    };
    let (weight, c_one) = first_order(1.0)?;
    let (_, c_zero) = first_order(0.0)?;
    let (_, c_two) = first_order(std::f64::consts::SQRT_2)?;
    let quartic = (c_two - c_zero - (c_one - c_zero) * 2.0) / 2.0;
    let leading = weight.volume_factor() / (2.0 * std::f64::consts::PI).powi(dim as i32);
    let s0 = -I * hbar * weight.exponent();
    let s1 = -I * hbar * quartic;
    Ok(KernelValue::assemble(params, e, leading, c_one - quartic, s0, s1))
}

/// Oscillator propagator with the canonical prefactor.
pub fn sho_kernel(params: &ModelParams, e: &Endpoints) -> Result<KernelValue> {
    sho_kernel_with(params, e, &PrefactorSpec::canonical(params.dim))
}

/// Oscillator propagator with an arbitrary prefactor ansatz.
pub fn sho_kernel_with(params: &ModelParams, e: &Endpoints, spec: &PrefactorSpec) -> Result<KernelValue> {
    e.check_dim(params.dim)?;
    if params.is_free() {
        return Err(Error::InvalidParameter("sho_kernel needs omega > 0; use free_kernel".into()));
    }
    let t = check_time(e)?;
    let inv = PairInvariants::of(&e.q0, &e.qf);
    let (s0, s1) = action_terms(params, &inv, t)?;
    let f = prefactor_terms(params, spec, &inv, t)?;
    Ok(KernelValue::assemble(params, e, sho_leading_prefactor(params, t)?, f, s0, s1))
}

/// Free kernel for `omega = 0` or `|omega T| < CROSSOVER_OMEGA_T`, oscillator
/// kernel otherwise.
pub fn kernel(params: &ModelParams, e: &Endpoints) -> Result<KernelValue> {
    if params.is_free() {
        return free_kernel(params, e);
    }
    let wt = params.omega * e.time.magnitude().abs();
    if wt < CROSSOVER_OMEGA_T {
        let free = free_kernel(params, e)?;
        if let Ok(sho) = sho_kernel(params, e) {
            let gap = (sho.amplitude - free.amplitude).norm() / free.amplitude.norm();
            if gap > 1e-6 {
                log::warn!("omega T = {wt:e}: oscillator and free kernels differ by {gap:e}, using the free form");
            }
        }
        return Ok(free);
    }
    sho_kernel(params, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TimeArg;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn params(omega: f64, alpha: f64, dim: usize) -> ModelParams {
        ModelParams::new(1.0, 1.0, omega, alpha, dim).unwrap()
    }

    fn ends(q0: Vec<f64>, qf: Vec<f64>, t: f64) -> Endpoints {
        Endpoints::new(q0.into(), qf.into(), TimeArg::real(t).unwrap()).unwrap()
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    fn random_ends(rng: &mut ChaCha8Rng, dim: usize, euclidean: bool) -> Endpoints {
        let q0: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let qf: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let t = rng.random_range(0.3..2.5);
        let time = if euclidean { TimeArg::euclidean(t) } else { TimeArg::real(t) };
        Endpoints::new(q0.into(), qf.into(), time.unwrap()).unwrap()
    }

    #[test]
    fn canonical_coefficients() {
        for dim in 1..=4 {
            let spec = PrefactorSpec::canonical(dim);
            let d = dim as f64;
            assert_eq!(8.0 * spec.beta1, d * (d + 2.0));
            assert_eq!(-8.0 * spec.beta2, d + 2.0);
            assert!(spec.is_canonical(dim));
        }
        let two = PrefactorSpec::canonical(2);
        assert_eq!((8.0 * two.beta1, -16.0 * two.beta2), (8.0, 8.0));
    }

    #[test]
    fn free_kernel_examples() {
        let k = free_kernel(&params(0.0, 0.0, 2), &ends(vec![0.3, 0.1], vec![0.3, 0.1], 1.0)).unwrap();
        assert!((k.amplitude - C64::new(0.0, -1.0 / (2.0 * PI))).norm() < 1e-16);

        let k = free_kernel(&params(0.0, 0.01, 1), &ends(vec![0.0], vec![1.0], 1.0)).unwrap();
        let lead = (C64::new(0.0, -1.0) / (2.0 * PI)).sqrt();
        assert!(rel(k.leading_prefactor, lead) < 1e-15);
        assert!((1.0 + k.f_alpha * 0.01 - C64::new(0.94, 0.03)).norm() < 1e-15);
        assert!(((k.s0 + 0.01 * k.s1).re - 0.49).abs() < 1e-15);
        let expect = lead * C64::new(0.94, 0.03) * (I * 0.49).exp();
        assert!(rel(k.amplitude, expect) < 1e-14);

        let p = ModelParams::new(1.3, 0.7, 0.0, 0.0, 3).unwrap();
        let e = ends(vec![0.1, -0.2, 0.4], vec![0.5, 0.3, -0.1], 0.8);
        let k = free_kernel(&p, &e).unwrap();
        let sep = 0.16 + 0.25 + 0.25;
        let z = C64::new(1.3, 0.0) / (2.0 * PI * I * 0.7 * 0.8);
        let expect = z.powf(1.5) * (I * 1.3 * sep / (2.0 * 0.7 * 0.8)).exp();
        assert!(rel(k.amplitude, expect) < 1e-14);
    }

    #[test]
    fn two_dimensional_bracket() {
        // 1 + 8 i alpha hbar m / T - 8 alpha m^2 |dq|^2 / T^2
        let p = ModelParams::new(1.5, 0.8, 0.0, 0.02, 2).unwrap();
        let e = ends(vec![0.2, 0.4], vec![-0.3, 1.0], 1.7);
        let k = free_kernel(&p, &e).unwrap();
        let sep = 0.25 + 0.36;
        let expect = C64::new(-8.0 * 1.5 * 1.5 * sep / 1.7f64.powi(2), 8.0 * 0.8 * 1.5 / 1.7);
        assert!((k.f_alpha - expect).norm() < 1e-14);
    }

    #[test]
    fn spectral_route_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in 1..=3 {
            for alpha in [0.0, 1e-4, 1e-2] {
                for euclidean in [false, true] {
                    for _ in 0..10 {
                        let e = random_ends(&mut rng, dim, euclidean);
                        let p = params(0.0, alpha, dim);
                        let a = free_kernel(&p, &e).unwrap();
                        let b = free_kernel_spectral(&p, &e).unwrap();
                        assert!(rel(b.amplitude, a.amplitude) < 1e-12, "D={dim} alpha={alpha}");
                        if alpha == 0.0 {
                            assert!(rel(b.amplitude, a.amplitude) < 1e-14);
                        }
                    }
                }
            }
        }
        let p = params(0.0, 0.01, 2);
        let e = ends(vec![0.0, 0.0], vec![1.0, 0.0], 1.0);
        assert!(rel(free_kernel_spectral(&p, &e).unwrap().amplitude, free_kernel(&p, &e).unwrap().amplitude) < 1e-12);
        let p = params(0.0, 0.001, 1);
        let e = Endpoints::new(vec![0.2].into(), vec![0.9].into(), TimeArg::euclidean(1.0).unwrap()).unwrap();
        let a = free_kernel(&p, &e).unwrap();
        let b = free_kernel_spectral(&p, &e).unwrap();
        assert!(rel(b.amplitude, a.amplitude) < 1e-12);
        assert!(a.amplitude.im.abs() < 1e-16 * a.amplitude.re);
    }

    fn one_dim_prefactor(m: f64, hbar: f64, w: f64, t: f64, q0: f64, qf: f64) -> C64 {
        let th = w * t;
        let (s, c) = th.sin_cos();
        let first = C64::new(0.0, 3.0 * hbar * m * w / (8.0 * s * s) * (2.0 * th + 5.0 * s * c + th * (2.0 * th).cos()));
        let n = q0 * q0 + qf * qf;
        let second = -3.0 * m * m * w * w / (8.0 * s.powi(3))
            * (2.0 * th * (3.0 * c * n - 2.0 * (2.0 + (2.0 * th).cos()) * q0 * qf)
                + 10.0 * s * (n - 2.0 * q0 * qf * c)
                - 6.0 * s.powi(3) * n);
        first + second
    }

    #[test]
    fn one_dimensional_prefactor() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let (m, hbar, w) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0), rng.random_range(0.3..2.0));
            let (q0, qf, t) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.2..1.4));
            let p = ModelParams::new(m, hbar, w, 0.0, 1).unwrap();
            let f = sho_prefactor(&p, &ends(vec![q0], vec![qf], t), &PrefactorSpec::canonical(1)).unwrap();
            let expect = one_dim_prefactor(m, hbar, w, t, q0, qf);
            assert!((f - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
        }
    }

    #[test]
    fn prefactor_limits() {
        let p = params(1e-6, 0.0, 2);
        let f = sho_prefactor(&p, &ends(vec![0.0, 0.0], vec![1.0, 0.0], 1.0), &PrefactorSpec::canonical(2)).unwrap();
        assert!((f - C64::new(-8.0, 8.0)).norm() < 1e-4, "{f}");

        let p = params(0.9, 0.0, 3);
        let e = ends(vec![0.0; 3], vec![0.0; 3], 1.1);
        let full = sho_prefactor(&p, &e, &PrefactorSpec::canonical(3)).unwrap();
        let no_b2 = PrefactorSpec { beta2: 0.0, ..PrefactorSpec::canonical(3) };
        assert_eq!(full, sho_prefactor(&p, &e, &no_b2).unwrap());
        assert_eq!(full.re, 0.0);
    }

    #[test]
    fn mehler_and_limits() {
        let k = sho_kernel(&params(1.0, 0.0, 1), &ends(vec![0.0], vec![0.0], FRAC_PI_4)).unwrap();
        let expect = (C64::new(1.0, 0.0) / (2.0 * PI * I * FRAC_PI_4.sin())).sqrt();
        assert!(rel(k.amplitude, expect) < 1e-15);

        for dim in 1..=3 {
            let e = ends(vec![0.2; dim], vec![-0.4; dim], 1.0);
            let sho = sho_kernel(&params(1e-4, 1e-3, dim), &e).unwrap();
            let free = free_kernel(&params(0.0, 1e-3, dim), &e).unwrap();
            assert!(rel(sho.amplitude, free.amplitude) < 1e-6);
        }
        assert!(matches!(
            sho_kernel(&params(1.0, 0.0, 1), &ends(vec![0.0], vec![0.0], PI)),
            Err(Error::Caustic { .. })
        ));
        assert!(sho_kernel(&params(0.0, 0.0, 1), &ends(vec![0.0], vec![0.0], 1.0)).is_err());
    }

    #[test]
    fn wrapper_dispatch() {
        let e = ends(vec![0.3, 0.0], vec![0.1, 0.5], 1.2);
        let free = params(0.0, 1e-3, 2);
        assert_eq!(kernel(&free, &e).unwrap(), free_kernel(&free, &e).unwrap());
        let sho = params(0.7, 1e-3, 2);
        assert_eq!(kernel(&sho, &e).unwrap(), sho_kernel(&sho, &e).unwrap());
        let tiny = params(1e-8, 1e-3, 2);
        assert_eq!(kernel(&tiny, &e).unwrap().amplitude, free_kernel(&tiny, &e).unwrap().amplitude);
    }

    #[test]
    fn euclidean_oscillator_is_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for dim in 1..=3 {
            for _ in 0..20 {
                let e = random_ends(&mut rng, dim, true);
                let k = sho_kernel(&params(rng.random_range(0.2..2.0), 0.0, dim), &e).unwrap();
                assert!(k.amplitude.re > 0.0 && k.amplitude.im.abs() <= 1e-14 * k.amplitude.re);
            }
        }
    }

    #[test]
    fn decomposition_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for dim in 1..=3 {
            for euclidean in [false, true] {
                for _ in 0..20 {
                    let e = random_ends(&mut rng, dim, euclidean);
                    for omega in [0.0, 0.8] {
                        let p = params(omega, 1e-2, dim);
                        let k = kernel(&p, &e).unwrap();
                        let swapped = kernel(&p, &e.swapped()).unwrap();
                        assert!(k.decomposition_defect() <= 1e-15 * k.amplitude.norm());
                        assert!(rel(swapped.amplitude, k.amplitude) < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn linearized_differs_at_second_order() {
        let e = ends(vec![0.2, 0.1], vec![0.9, -0.4], 1.0);
        let gap = |alpha: f64| {
            let k = sho_kernel(&params(0.6, alpha, 2), &e).unwrap();
            (k.amplitude - k.linearized()).norm()
        };
        let ratio = gap(1e-3) / gap(5e-4);
        assert!((ratio - 4.0).abs() < 0.05, "{ratio}");
    }
}
