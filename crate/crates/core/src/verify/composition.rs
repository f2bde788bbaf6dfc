//! The composition law `int d^D q K(qf, q; T2) K(q, q0; T1) = K(qf, q0; T1 + T2)`
//! at first order in alpha.
//!
//! With `S_0(x, y) = A (|x|^2 + |y|^2) - B x.y`, the product of the two
//! leading factors is `exp(c - a |q|^2 + 2 b.q)` with
//! `a = -i (A1 + A2) / hbar`, `2b = -i (B1 q0 + B2 qf) / hbar` and
//! `c = i (A1 |q0|^2 + A2 |qf|^2) / hbar`. The first-order bracket
//! `f + i S_1 / hbar` of each factor is a polynomial in `q`, so the whole
//! left side is a Gaussian moment.

use serde::{Deserialize, Serialize};

use crate::algebra::{FreeSlot, PairInvariants};
use crate::classical::{action_terms, checked_sin, quadratic_action_coeffs};
use crate::error::{Error, Result};
use crate::kernels::{kernel_with, leading_prefactor, prefactor_terms, PrefactorSpec};
use crate::model::{Endpoints, ModelParams, TimeArg, TimeKind, VecD, C64, I};
use crate::moments::{gaussian_expectation, CompensatedSum, GaussianWeight};
use crate::poly::MultiPoly;
use crate::quadrature::gauss_hermite;

use super::ResidualReport;

/// Smallest node count accepted by [`composition_check_quadrature`].
pub const MIN_QUADRATURE_NODES: usize = 32;

/// A split `T = T1 + T2` of the propagation time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionSplit {
    pub t1: TimeArg,
    pub t2: TimeArg,
    pub q0: VecD,
    pub qf: VecD,
}

impl CompositionSplit {
    /// Splits `e.time` after `t1` (same kind: real `T` or Euclidean `tau`).
    pub fn new(e: &Endpoints, t1: f64) -> Result<Self> {
        let total = e.time.magnitude();
        if !(total > 0.0) {
            return Err(Error::InvalidParameter("composition needs a positive total time".into()));
        }
        if !(t1 > 0.0 && t1 < total) {
            return Err(Error::InvalidParameter(format!("split point {t1} must lie strictly inside (0, {total})")));
        }
        Ok(Self { t1: e.time.with_magnitude(t1)?, t2: e.time.with_magnitude(total - t1)?, q0: e.q0.clone(), qf: e.qf.clone() })
    }

    pub fn total(&self) -> C64 {
        self.t1.value() + self.t2.value()
    }

    pub fn dim(&self) -> usize {
        self.q0.dim()
    }

    pub fn endpoints(&self) -> Result<Endpoints> {
        let time = self.t1.with_magnitude(self.t1.magnitude() + self.t2.magnitude())?;
        Endpoints::new(self.q0.clone(), self.qf.clone(), time)
    }

    /// `(T1, q0) <-> (T2, qf)`.
    pub fn mirrored(&self) -> Self {
        Self { t1: self.t2, t2: self.t1, q0: self.qf.clone(), qf: self.q0.clone() }
    }

    fn check(&self, params: &ModelParams) -> Result<()> {
        if self.qf.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: self.qf.dim() });
        }
        if self.dim() != params.dim {
            return Err(Error::DimensionMismatch { expected: params.dim, got: self.dim() });
        }
        if !params.is_free() {
            for t in [self.t1.value(), self.t2.value(), self.total()] {
                checked_sin(params.omega, t)?;
            }
        }
        Ok(())
    }
}

/// Gaussian weight over the intermediate point and the constant exponent `c`.
pub fn composition_weight(params: &ModelParams, split: &CompositionSplit) -> Result<(GaussianWeight, C64)> {
    split.check(params)?;
    let hbar = params.hbar;
    let (a1, b1) = quadratic_action_coeffs(params, split.t1.value())?;
    let (a2, b2) = quadratic_action_coeffs(params, split.t2.value())?;
    let a = -I * (a1 + a2) / hbar;
    let b = split
        .q0
        .iter()
        .zip(split.qf.iter())
        .map(|(&x0, &xf)| -I * (b1 * x0 + b2 * xf) / (2.0 * hbar))
        .collect();
    let c = I * (a1 * split.q0.norm_sq() + a2 * split.qf.norm_sq()) / hbar;
    Ok((GaussianWeight::new(a, b)?, c))
}

/// `S_1(q, q0; T1) + S_1(qf, q; T2)` as a polynomial in the intermediate point.
pub fn split_first_order_action(params: &ModelParams, split: &CompositionSplit) -> Result<MultiPoly> {
    let first = PairInvariants::with_variable(&split.q0, FreeSlot::Final);
    let second = PairInvariants::with_variable(&split.qf, FreeSlot::Initial);
    let (_, s_first) = action_terms(params, &first, split.t1.value())?;
    let (_, s_second) = action_terms(params, &second, split.t2.value())?;
    Ok(s_first + s_second)
}

/// Bookkeeping term `dS` with
/// `<S_1(q, q0; T1) + S_1(qf, q; T2)> = S_1(qf, q0; T) + dS`,
/// where `<.>` is the normalized composition Gaussian. General-`D` form.
pub fn delta_s(params: &ModelParams, split: &CompositionSplit) -> Result<C64> {
    if params.is_free() {
        return Err(Error::InvalidParameter("delta_s is stated for omega > 0".into()));
    }
    let (w, _) = composition_weight(params, split)?;
    let d = params.dim as f64;
    let block = |t: C64, q: &VecD| -> C64 {
        let (g1, g2, g3) = harmonics(params.omega * t);
        let a = w.a();
        let qb: C64 = q.iter().zip(w.b()).map(|(&x, b)| b * x).sum();
        let s = (t * params.omega).sin();
        -(d + 2.0) * (params.m * params.omega).powi(3) / (32.0 * s.powi(4))
            * (g1 / (a * a) * (d / 4.0 + w.b_sq() / a) - g2 * 2.0 * qb / (a * a) + g3 * 2.0 * q.norm_sq() / a)
    };
    Ok(block(split.t1.value(), &split.q0) + block(split.t2.value(), &split.qf))
}

/// The two-dimensional printed form of [`delta_s`].
pub fn delta_s_2d(params: &ModelParams, split: &CompositionSplit) -> Result<C64> {
    if params.dim != 2 || params.is_free() {
        return Err(Error::InvalidParameter("delta_s_2d needs D = 2 and omega > 0".into()));
    }
    let (w, _) = composition_weight(params, split)?;
    let block = |t: C64, q: &VecD| -> C64 {
        let (g1, g2, g3) = harmonics(params.omega * t);
        let a = w.a();
        let qb: C64 = q.iter().zip(w.b()).map(|(&x, b)| b * x).sum();
        let s = (t * params.omega).sin();
        -(params.m * params.omega).powi(3) / (32.0 * s.powi(4))
            * (g1 * 2.0 / (a * a) * (1.0 + w.b_sq() * 2.0 / a) - g2 * 8.0 * qb / (a * a) + g3 * 8.0 * q.norm_sq() / a)
    };
    Ok(block(split.t1.value(), &split.q0) + block(split.t2.value(), &split.qf))
}

/// `dS` from the moment engine: `<S_1 + S_1> - S_1(qf, q0; T)`.
pub fn delta_s_moments(params: &ModelParams, split: &CompositionSplit) -> Result<C64> {
    let (w, _) = composition_weight(params, split)?;
    let mean = gaussian_expectation(&split_first_order_action(params, split)?, &w)?;
    let inv = PairInvariants::of(&split.q0, &split.qf);
    let (_, direct) = action_terms(params, &inv, split.total())?;
    Ok(mean - direct)
}

fn harmonics(th: C64) -> (C64, C64, C64) {
    let g1 = th * 12.0 + (th * 2.0).sin() * 8.0 + (th * 4.0).sin();
    let g2 = th * th.cos() * 12.0 + th.sin() * 11.0 + (th * 3.0).sin() * 3.0;
    let g3 = th * 4.0 + th * (th * 2.0).cos() * 2.0 + (th * 2.0).sin() * 5.0;
    (g1, g2, g3)
}

/// Zeroth- and first-order parts of both sides of the composition law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositionSides {
    pub lhs_leading: C64,
    pub lhs_first: C64,
    pub rhs_leading: C64,
    pub rhs_first: C64,
}

impl CompositionSides {
    fn report(&self, alpha: f64) -> ResidualReport {
        let lhs = self.lhs_leading + self.lhs_first * alpha;
        let rhs = self.rhs_leading + self.rhs_first * alpha;
        ResidualReport::new((lhs - rhs).norm(), rhs.norm(), alpha)
    }
}

fn rhs_sides(params: &ModelParams, split: &CompositionSplit, spec: &PrefactorSpec) -> Result<(C64, C64)> {
    let whole = kernel_with(params, &split.endpoints()?, spec)?;
    let lead = whole.leading_order();
    Ok((lead, lead * whole.first_order_coefficient()))
}

/// Both sides of the law with the left side from the moment engine.
pub fn composition_sides(params: &ModelParams, split: &CompositionSplit, spec: &PrefactorSpec) -> Result<CompositionSides> {
    let (w, c) = composition_weight(params, split)?;
    let lead = leading_prefactor(params, split.t1.value())? * leading_prefactor(params, split.t2.value())?;
    let lhs_leading = lead * (c + w.exponent()).exp() * w.volume_factor();

    let first = PairInvariants::with_variable(&split.q0, FreeSlot::Final);
    let second = PairInvariants::with_variable(&split.qf, FreeSlot::Initial);
    let f = prefactor_terms(params, spec, &first, split.t1.value())?
        + prefactor_terms(params, spec, &second, split.t2.value())?;
    let bracket = f + split_first_order_action(params, split)? * (I / params.hbar);
    let lhs_first = lhs_leading * gaussian_expectation(&bracket, &w)?;

    let (rhs_leading, rhs_first) = rhs_sides(params, split, spec)?;
    Ok(CompositionSides { lhs_leading, lhs_first, rhs_leading, rhs_first })
}

/// Relative composition residual of the first-order kernel, exact
/// integration over the intermediate point. Real or Euclidean time.
pub fn composition_check_analytic(
    params: &ModelParams,
    e: &Endpoints,
    t1: f64,
    spec: &PrefactorSpec,
) -> Result<ResidualReport> {
    let split = CompositionSplit::new(e, t1)?;
    Ok(composition_sides(params, &split, spec)?.report(params.alpha))
}

/// Same law with the intermediate integral done by tensor Gauss-Hermite
/// quadrature over pointwise kernel values. Euclidean time, `D <= 2`.
pub fn composition_check_quadrature(
    params: &ModelParams,
    e: &Endpoints,
    t1: f64,
    nodes: usize,
) -> Result<ResidualReport> {
    composition_check_quadrature_with(params, e, t1, nodes, &PrefactorSpec::canonical(params.dim))
}

pub fn composition_check_quadrature_with(
    params: &ModelParams,
    e: &Endpoints,
    t1: f64,
    nodes: usize,
    spec: &PrefactorSpec,
) -> Result<ResidualReport> {
    if e.time.kind() != TimeKind::Euclidean {
        return Err(Error::InvalidParameter("quadrature composition needs Euclidean time".into()));
    }
    if params.dim > 2 {
        return Err(Error::InvalidParameter(format!("quadrature composition supports D <= 2, got {}", params.dim)));
    }
    if nodes < MIN_QUADRATURE_NODES {
        return Err(Error::InvalidParameter(format!("need at least {MIN_QUADRATURE_NODES} nodes, got {nodes}")));
    }
    let split = CompositionSplit::new(e, t1)?;
    split.check(params)?;
    // Grid placement only: centre and width of the Euclidean Gaussian.
    let (w, _) = composition_weight(params, &split)?;
    let scale = 1.0 / w.a().re.sqrt();
    let centre: Vec<f64> = w.center().iter().map(|z| z.re).collect();
    let (x, wt) = gauss_hermite(nodes);
    let dim = params.dim;

    let mut lead = CompensatedSum::default();
    let mut first = CompensatedSum::default();
    let total_points = nodes.pow(dim as u32);
    for flat in 0..total_points {
        let mut r = flat;
        let mut q = Vec::with_capacity(dim);
        let mut weight = scale.powi(dim as i32);
        for axis in 0..dim {
            let i = r % nodes;
            r /= nodes;
            q.push(centre[axis] + scale * x[i]);
            weight *= wt[i] * (x[i] * x[i]).exp();
        }
        let q = VecD::from(q);
        let k1 = kernel_with(params, &Endpoints::new(split.q0.clone(), q.clone(), split.t1)?, spec)?;
        let k2 = kernel_with(params, &Endpoints::new(q, split.qf.clone(), split.t2)?, spec)?;
        let product = k1.leading_order() * k2.leading_order() * weight;
        lead.add(product);
        first.add(product * (k1.first_order_coefficient() + k2.first_order_coefficient()));
    }
    let (rhs_leading, rhs_first) = rhs_sides(params, &split, spec)?;
    let sides = CompositionSides { lhs_leading: lead.value(), lhs_first: first.value(), rhs_leading, rhs_first };
    Ok(sides.report(params.alpha))
}
