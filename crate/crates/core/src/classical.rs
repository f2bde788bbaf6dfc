//! Classical actions `S_0 + alpha S_1` for the free particle and the
//! oscillator in any dimension, and the first-order trajectory of the
//! two-dimensional oscillator.

use serde::{Deserialize, Serialize};

use crate::algebra::{PairInvariants, Ring};
use crate::error::{Error, Result};
use crate::model::{displacement, Endpoints, ModelParams, TimeKind, VecD, C64};

/// Below this `|sin(omega T)|` the oscillator formulas are refused.
pub const CAUSTIC_THRESHOLD: f64 = 1e-8;

/// `sin(omega T)`, or a caustic error near its zeros.
pub fn checked_sin(omega: f64, t: C64) -> Result<C64> {
    let theta = t * omega;
    let s = theta.sin();
    if s.norm() < CAUSTIC_THRESHOLD {
        return Err(Error::Caustic { omega_t: format_theta(theta), sin_abs: s.norm() });
    }
    Ok(s)
}

fn format_theta(theta: C64) -> String {
    if theta.im == 0.0 {
        format!("{}", theta.re)
    } else {
        format!("{theta}")
    }
}

fn nonzero_time(t: C64) -> Result<()> {
    if t == C64::default() {
        Err(Error::ZeroTime)
    } else {
        Ok(())
    }
}

/// Coefficients `(A, B)` of the quadratic action `S_0 = A (|q0|^2 + |qf|^2) - B q0.qf`.
pub fn quadratic_action_coeffs(params: &ModelParams, t: C64) -> Result<(C64, C64)> {
    nonzero_time(t)?;
    let m = params.m;
    if params.is_free() {
        return Ok((m / (2.0 * t), m / t));
    }
    let w = params.omega;
    let s = checked_sin(w, t)?;
    let c = (t * w).cos();
    Ok((m * w * c / (2.0 * s), m * w / s))
}

/// `(S_0, S_1)` as functions of the endpoint invariants at complex time `t`.
pub fn action_terms<R: Ring>(params: &ModelParams, inv: &PairInvariants<R>, t: C64) -> Result<(R, R)> {
    nonzero_time(t)?;
    let m = params.m;
    if params.is_free() {
        let sep = inv.separation_sq();
        let s0 = sep.clone() * (m / (2.0 * t));
        let s1 = sep.clone() * sep * (-m.powi(3) / (t * t * t));
        return Ok((s0, s1));
    }
    let (a, b) = quadratic_action_coeffs(params, t)?;
    let s0 = inv.norm_sum() * a - inv.dot.clone() * b;

    let w = params.omega;
    let th = t * w;
    let s = th.sin();
    let g1 = th * 12.0 + (th * 2.0).sin() * 8.0 + (th * 4.0).sin();
    let g2 = th * th.cos() * 12.0 + s * 11.0 + (th * 3.0).sin() * 3.0;
    let g3 = th * 4.0 + th * (th * 2.0).cos() * 2.0 + (th * 2.0).sin() * 5.0;
    let pref = -(m * w).powi(3) / (32.0 * s.powi(4));
    let quartic = inv.n0.clone() * inv.n0.clone() + inv.nf.clone() * inv.nf.clone();
    let mixed = inv.dot.clone() * inv.norm_sum();
    let cross = inv.dot.clone() * inv.dot.clone() * C64::new(2.0, 0.0) + inv.n0.clone() * inv.nf.clone();
    let bracket = quartic * g1 - mixed * (g2 * 4.0) + cross * (g3 * 4.0);
    Ok((s0, bracket * pref))
}

/// Classical action `S_0 + alpha S_1` split into its two orders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionPair {
    #[serde(rename = "S0")]
    pub s0: f64,
    #[serde(rename = "S1")]
    pub s1: f64,
}

impl ActionPair {
    pub fn total(&self, alpha: f64) -> f64 {
        self.s0 + alpha * self.s1
    }
}

fn real_time(e: &Endpoints) -> Result<f64> {
    match e.time.kind() {
        TimeKind::Real => Ok(e.time.magnitude()),
        TimeKind::Euclidean => Err(Error::InvalidParameter("classical actions take real time".into())),
    }
}

/// Oscillator action; the same expressions hold in every dimension.
pub fn sho_action(params: &ModelParams, e: &Endpoints) -> Result<ActionPair> {
    e.check_dim(params.dim)?;
    if params.is_free() {
        return Err(Error::InvalidParameter("sho_action needs omega > 0".into()));
    }
    let t = real_time(e)?;
    let (s0, s1) = action_terms(params, &PairInvariants::of(&e.q0, &e.qf), t.into())?;
    Ok(ActionPair { s0: s0.re, s1: s1.re })
}

/// `S = (m / 2T)|dq|^2 (1 - 2 alpha m^2 |dq|^2 / T^2)`.
pub fn free_action(params: &ModelParams, e: &Endpoints) -> Result<ActionPair> {
    e.check_dim(params.dim)?;
    let t = real_time(e)?;
    let (_, sep) = displacement(e)?;
    let m = params.m;
    Ok(ActionPair { s0: m * sep / (2.0 * t), s1: -m.powi(3) * sep * sep / t.powi(3) })
}

/// First-order oscillator trajectory in two dimensions.
///
/// Per coordinate `k`:
/// `q_k = A_k cos wt + B_k sin wt + alpha [F_k cos wt + G_k sin wt
///        + (m^2 w^2 / 8)(-4 C3 wt cos wt + 4 C1 wt sin wt - C2 cos 3wt - C4 sin 3wt)]`
/// with `c[1]` holding the label-swapped coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalPath {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub f: [f64; 2],
    pub g: [f64; 2],
    /// `c[k] = [C1, C2, C3, C4]` for coordinate `k`.
    pub c: [[f64; 4]; 2],
    pub params: ModelParams,
    pub total_time: f64,
    q0: [f64; 2],
    qf: [f64; 2],
}

fn cubic_coefficients(a1: f64, a2: f64, b1: f64, b2: f64) -> [f64; 4] {
    let c1 = -3.0 * a1 * (a1 * a1 + a2 * a2 + b1 * b1) - 2.0 * a2 * b1 * b2 - a1 * b2 * b2;
    let c2 = 3.0 * (a1.powi(3) - 2.0 * a2 * b1 * b2 + a1 * (a2 * a2 - 3.0 * b1 * b1 - b2 * b2));
    let c3 = -3.0 * a1 * a1 * b1 - 2.0 * a1 * a2 * b2 - a2 * a2 * b1 - 3.0 * b1 * (b1 * b1 + b2 * b2);
    let c4 = 3.0 * (3.0 * a1 * a1 * b1 + 2.0 * a1 * a2 * b2 - b1 * (-a2 * a2 + b1 * b1 + b2 * b2));
    [c1, c2, c3, c4]
}

pub fn sho_trajectory_2d(params: &ModelParams, e: &Endpoints) -> Result<ClassicalPath> {
    if params.dim != 2 {
        return Err(Error::InvalidParameter(format!("trajectories are two-dimensional, got D = {}", params.dim)));
    }
    e.check_dim(2)?;
    if params.is_free() {
        return Err(Error::InvalidParameter("omega = 0: the free path is a straight line".into()));
    }
    let t = real_time(e)?;
    if t <= 0.0 {
        return Err(Error::InvalidParameter("trajectory needs T > 0".into()));
    }
    let w = params.omega;
    let th = w * t;
    let s = checked_sin(w, t.into())?.re;
    let c = th.cos();
    let a = [e.q0[0], e.q0[1]];
    let b = [(e.qf[0] - a[0] * c) / s, (e.qf[1] - a[1] * c) / s];
    let cc = [cubic_coefficients(a[0], a[1], b[0], b[1]), cubic_coefficients(a[1], a[0], b[1], b[0])];
    let kappa = params.m.powi(2) * w * w / 8.0;
    let mut f = [0.0; 2];
    let mut g = [0.0; 2];
    for k in 0..2 {
        let [c1, c2, c3, c4] = cc[k];
        f[k] = kappa * c2;
        g[k] = kappa / s
            * ((4.0 * th * c3 - c2) * c - 4.0 * th * c1 * s + c2 * (3.0 * th).cos() + c4 * (3.0 * th).sin());
    }
    Ok(ClassicalPath { a, b, f, g, c: cc, params: *params, total_time: t, q0: a, qf: [e.qf[0], e.qf[1]] })
}

impl ClassicalPath {
    fn kappa(&self) -> f64 {
        self.params.m.powi(2) * self.params.omega.powi(2) / 8.0
    }

    /// Secular and third-harmonic part `h_k(theta)` and its first two
    /// theta-derivatives.
    fn particular(&self, k: usize, th: f64) -> [f64; 3] {
        let [c1, c2, c3, c4] = self.c[k];
        let (s, c) = th.sin_cos();
        let (s3, c3h) = (3.0 * th).sin_cos();
        let kap = self.kappa();
        let h = -4.0 * c3 * th * c + 4.0 * c1 * th * s - c2 * c3h - c4 * s3;
        let dh = -4.0 * c3 * (c - th * s) + 4.0 * c1 * (s + th * c) + 3.0 * c2 * s3 - 3.0 * c4 * c3h;
        let d2h = 8.0 * c3 * s + 4.0 * c3 * th * c + 8.0 * c1 * c - 4.0 * c1 * th * s + 9.0 * c2 * c3h + 9.0 * c4 * s3;
        [kap * h, kap * dh, kap * d2h]
    }

    fn check_t(&self, t: f64) -> Result<()> {
        let slack = 1e-12 * self.total_time;
        if !(t >= -slack && t <= self.total_time + slack) {
            return Err(Error::OutOfDomain(format!("t = {t} outside [0, {}]", self.total_time)));
        }
        Ok(())
    }

    /// Position at time `t`.
    ///
    /// Evaluated in the two-point form
    /// `q = [q0 sin w(T-t) + qf sin wt] / sin wT + alpha (h(t) - [h(0) sin w(T-t) + h(T) sin wt] / sin wT)`,
    /// which is algebraically identical to the `A, B, F, G` expansion and
    /// returns the endpoints bit-exactly.
    pub fn eval(&self, t: f64) -> Result<VecD> {
        self.check_t(t)?;
        let w = self.params.omega;
        let big_t = self.total_time;
        let s_total = (w * big_t).sin();
        let s_back = (w * (big_t - t)).sin() / s_total;
        let s_fwd = (w * t).sin() / s_total;
        let alpha = self.params.alpha;
        let out: Vec<f64> = (0..2)
            .map(|k| {
                let h = self.particular(k, w * t)[0];
                let h0 = self.particular(k, 0.0)[0];
                let ht = self.particular(k, w * big_t)[0];
                let zeroth = self.q0[k] * s_back + self.qf[k] * s_fwd;
                zeroth + alpha * (h - (h0 * s_back + ht * s_fwd))
            })
            .collect();
        Ok(VecD::from(out))
    }

    /// Position, velocity and acceleration from the `A, B, F, G` expansion.
    pub fn kinematics(&self, t: f64) -> Result<[[f64; 2]; 3]> {
        self.check_t(t)?;
        let w = self.params.omega;
        let th = w * t;
        let (s, c) = th.sin_cos();
        let alpha = self.params.alpha;
        let mut out = [[0.0; 2]; 3];
        for k in 0..2 {
            let [h, dh, d2h] = self.particular(k, th);
            let amp_c = self.a[k] + alpha * self.f[k];
            let amp_s = self.b[k] + alpha * self.g[k];
            out[0][k] = amp_c * c + amp_s * s + alpha * h;
            out[1][k] = w * (-amp_c * s + amp_s * c + alpha * dh);
            out[2][k] = w * w * (-amp_c * c - amp_s * s + alpha * d2h);
        }
        Ok(out)
    }

    /// Residual of the first-order equations of motion at time `t`.
    pub fn eom_residual(&self, t: f64) -> Result<VecD> {
        let [q, v, acc] = self.kinematics(t)?;
        let w2 = self.params.omega.powi(2);
        let k4 = 4.0 * self.params.alpha * self.params.m.powi(2);
        let r1 = acc[0] + w2 * q[0] - k4 * ((3.0 * v[0] * v[0] + v[1] * v[1]) * acc[0] + 2.0 * v[0] * v[1] * acc[1]);
        let r2 = acc[1] + w2 * q[1] - k4 * ((v[0] * v[0] + 3.0 * v[1] * v[1]) * acc[1] + 2.0 * v[0] * v[1] * acc[0]);
        Ok(VecD::from([r1, r2]))
    }

    /// Largest residual norm over `samples + 1` equally spaced times.
    pub fn max_eom_residual(&self, samples: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for i in 0..=samples {
            let t = self.total_time * i as f64 / samples as f64;
            worst = worst.max(self.eom_residual(t)?.norm_sq().sqrt());
        }
        Ok(worst)
    }
}

/// `path.eval(t)`.
pub fn path_eval(path: &ClassicalPath, t: f64) -> Result<VecD> {
    path.eval(t)
}

/// `path.eom_residual(t)`.
pub fn eom_residual(path: &ClassicalPath, t: f64) -> Result<VecD> {
    path.eom_residual(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TimeArg;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn params(alpha: f64, dim: usize) -> ModelParams {
        ModelParams::new(1.0, 1.0, 1.0, alpha, dim).unwrap()
    }

    fn ends(q0: Vec<f64>, qf: Vec<f64>, t: f64) -> Endpoints {
        Endpoints::new(q0.into(), qf.into(), TimeArg::real(t).unwrap()).unwrap()
    }

    #[test]
    fn harmonic_path_without_correction() {
        let path = sho_trajectory_2d(&params(0.0, 2), &ends(vec![1.0, 0.0], vec![0.0, 0.0], FRAC_PI_2)).unwrap();
        for t in [0.0, 0.3, 1.0, FRAC_PI_2] {
            let q = path.eval(t).unwrap();
            assert!((q[0] - t.cos()).abs() < 1e-15 && q[1].abs() < 1e-15);
        }
        let path = sho_trajectory_2d(&params(0.0, 2), &ends(vec![1.0, 0.0], vec![0.0, 1.0], FRAC_PI_2)).unwrap();
        let q = path.eval(FRAC_PI_4).unwrap();
        let h = 0.5f64.sqrt();
        assert!((q[0] - h).abs() < 1e-15 && (q[1] - h).abs() < 1e-15);
    }

    #[test]
    fn endpoints_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let q0 = vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let qf = vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let t = rng.random_range(0.1..3.0);
            let alpha = rng.random_range(0.0..0.05);
            let path = sho_trajectory_2d(&params(alpha, 2), &ends(q0.clone(), qf.clone(), t)).unwrap();
            assert_eq!(path.eval(0.0).unwrap().to_vec(), q0);
            assert_eq!(path.eval(t).unwrap().to_vec(), qf);
            // The A, B, F, G expansion agrees with the two-point form.
            let k = path.kinematics(t).unwrap()[0];
            assert!((k[0] - qf[0]).abs() < 1e-11 && (k[1] - qf[1]).abs() < 1e-11);
        }
    }

    #[test]
    fn caustic_and_free_rejected() {
        assert!(matches!(
            sho_trajectory_2d(&params(0.0, 2), &ends(vec![1.0, 0.0], vec![0.0, 0.0], PI)),
            Err(Error::Caustic { .. })
        ));
        assert!(sho_trajectory_2d(&params(0.0, 2).with_omega(0.0), &ends(vec![0.0; 2], vec![1.0; 2], 1.0)).is_err());
        let path = sho_trajectory_2d(&params(0.0, 2), &ends(vec![1.0, 0.0], vec![0.0, 0.0], 1.0)).unwrap();
        assert!(path.eval(1.5).is_err());
    }

    #[test]
    fn eom_residual_vanishes_without_correction() {
        let path = sho_trajectory_2d(&params(0.0, 2), &ends(vec![0.3, -0.8], vec![1.1, 0.4], 1.2)).unwrap();
        for i in 0..=20 {
            let r = path.eom_residual(1.2 * i as f64 / 20.0).unwrap();
            assert!(r.norm_sq().sqrt() < 1e-14);
        }
    }

    #[test]
    fn eom_residual_is_second_order() {
        let e = ends(vec![1.0, 0.0], vec![0.0, 1.0], 1.0);
        for t in [0.2, 0.5, 0.9] {
            let big = sho_trajectory_2d(&params(1e-2, 2), &e).unwrap().eom_residual(t).unwrap();
            let small = sho_trajectory_2d(&params(5e-3, 2), &e).unwrap().eom_residual(t).unwrap();
            let ratio = big.norm_sq().sqrt() / small.norm_sq().sqrt();
            assert!((3.6..=4.4).contains(&ratio), "t={t}: {ratio}");
        }
        let unit = ends(vec![1.0, 0.0], vec![1.0, 0.0], 1.0);
        let worst = sho_trajectory_2d(&params(1e-3, 2), &unit).unwrap().max_eom_residual(200).unwrap();
        assert!(worst <= 1e-4, "{worst}");
    }

    #[test]
    fn cubic_coefficients_swap_labels() {
        let path = sho_trajectory_2d(&params(0.01, 2), &ends(vec![0.3, -0.8], vec![1.1, 0.4], 1.2)).unwrap();
        let swapped = sho_trajectory_2d(&params(0.01, 2), &ends(vec![-0.8, 0.3], vec![0.4, 1.1], 1.2)).unwrap();
        assert_eq!(path.c[0], swapped.c[1]);
        assert_eq!(path.c[1], swapped.c[0]);
    }

    #[test]
    fn action_examples() {
        let s = sho_action(&params(0.0, 1), &ends(vec![1.0], vec![1.0], FRAC_PI_2)).unwrap();
        assert!((s.s0 + 1.0).abs() < 1e-15);
        let s = sho_action(&params(0.1, 3), &ends(vec![0.0; 3], vec![0.0; 3], 1.3)).unwrap();
        assert_eq!((s.s0, s.s1), (0.0, 0.0));

        let free = free_action(&params(0.0, 1), &ends(vec![0.0], vec![1.0], 1.0)).unwrap();
        assert_eq!(free.total(0.0), 0.5);
        assert!((free.total(0.01) - 0.49).abs() < 1e-15);
        assert_eq!(free_action(&params(0.0, 2), &ends(vec![0.5; 2], vec![0.5; 2], 1.0)).unwrap().total(0.3), 0.0);
    }

    #[test]
    fn action_symmetric_under_endpoint_swap() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let q0: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let qf: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let e = ends(q0, qf, rng.random_range(0.1..3.0));
            let a = sho_action(&params(0.0, 3), &e).unwrap();
            let b = sho_action(&params(0.0, 3), &e.swapped()).unwrap();
            assert!((a.s0 - b.s0).abs() <= 1e-12 * (1.0 + a.s0.abs()));
            assert!((a.s1 - b.s1).abs() <= 1e-12 * (1.0 + a.s1.abs()));
        }
    }

    #[test]
    fn small_omega_limit() {
        let p = ModelParams::new(1.0, 1.0, 1e-6, 0.0, 1).unwrap();
        let s = sho_action(&p, &ends(vec![0.0], vec![1.0], 1.0)).unwrap();
        assert!((s.s0 - 0.5).abs() < 1e-6);
        assert!((s.s1 + 1.0).abs() < 1e-6);
        let p = p.with_omega(1e-4).with_dim(2);
        let e = ends(vec![0.3, -0.1], vec![0.9, 0.6], 1.0);
        let s = sho_action(&p, &e).unwrap();
        let free = free_action(&p.with_omega(0.0), &e).unwrap();
        assert!((s.s0 - free.s0).abs() < 1e-6);
        assert!((s.s1 / free.s1 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn euclidean_time_rejected_for_actions() {
        let e = Endpoints::new(vec![0.0].into(), vec![1.0].into(), TimeArg::euclidean(1.0).unwrap()).unwrap();
        assert!(sho_action(&params(0.0, 1), &e).is_err());
        assert!(free_action(&params(0.0, 1), &e).is_err());
    }
}
