//! Exact integrals of polynomial times Gaussian,
//! `int d^D q P(q) exp(-a |q|^2 + 2 b.q)`, for complex `a` and `b`.
//!
//! Squares such as `|b|^2` are analytic sums `sum_i b_i^2` (no conjugation),
//! which is the continuation that keeps the real-argument formulas valid for
//! the purely imaginary weights of real-time propagators.
//!
//! The general engine completes the square (`q = b/a + u`) and evaluates each
//! central monomial by Isserlis pairing: an even power `u_i^{2k}` contributes
//! `(2k-1)!! / (2a)^k`, odd powers vanish.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{principal_pow, C64};
use crate::poly::MultiPoly;
use crate::quadrature::gauss_hermite;

/// Gaussian weight `exp(-a |q|^2 + 2 b.q)` in `b.len()` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianWeight {
    a: C64,
    b: Vec<C64>,
}

impl GaussianWeight {
    pub fn new(a: C64, b: Vec<C64>) -> Result<Self> {
        if !(a.re.is_finite() && a.im.is_finite()) || b.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
            return Err(Error::InvalidParameter("gaussian weight must be finite".into()));
        }
        if a == C64::default() {
            return Err(Error::InvalidParameter("gaussian weight requires a != 0".into()));
        }
        if a.re < 0.0 {
            return Err(Error::InvalidParameter(format!("gaussian weight requires Re(a) >= 0, got {a}")));
        }
        if b.is_empty() {
            return Err(Error::InvalidParameter("gaussian weight needs dimension >= 1".into()));
        }
        Ok(Self { a, b })
    }

    pub fn centered(a: C64, dim: usize) -> Result<Self> {
        Self::new(a, vec![C64::default(); dim])
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn b(&self) -> &[C64] {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `sum_i b_i^2`.
    pub fn b_sq(&self) -> C64 {
        self.b.iter().map(|x| x * x).sum()
    }

    /// Stationary point `b / a`.
    pub fn center(&self) -> Vec<C64> {
        self.b.iter().map(|x| x / self.a).collect()
    }

    /// `(pi/a)^{D/2}` on the principal branch.
    pub fn volume_factor(&self) -> C64 {
        principal_pow(C64::new(std::f64::consts::PI, 0.0) / self.a, self.dim() as f64 / 2.0)
    }

    /// `|b|^2 / a`.
    pub fn exponent(&self) -> C64 {
        self.b_sq() / self.a
    }

    /// `int d^D q exp(-a |q|^2 + 2 b.q) = (pi/a)^{D/2} exp(|b|^2/a)`.
    pub fn total(&self) -> C64 {
        self.volume_factor() * self.exponent().exp()
    }
}

/// The six closed-form moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentKind {
    /// `1`
    Basic,
    /// `|q|^2`
    Q2,
    /// `x.q`
    Xq,
    /// `(x.q)^2`
    Xq2,
    /// `(x.q) |q|^2`
    Q2Xq,
    /// `|q|^4`
    Q4,
}

impl MomentKind {
    pub const ALL: [MomentKind; 6] =
        [MomentKind::Basic, MomentKind::Q2, MomentKind::Xq, MomentKind::Xq2, MomentKind::Q2Xq, MomentKind::Q4];

    pub fn name(self) -> &'static str {
        match self {
            MomentKind::Basic => "basic",
            MomentKind::Q2 => "q2",
            MomentKind::Xq => "xq",
            MomentKind::Xq2 => "xq2",
            MomentKind::Q2Xq => "q2xq",
            MomentKind::Q4 => "q4",
        }
    }

    pub fn needs_x(self) -> bool {
        matches!(self, MomentKind::Xq | MomentKind::Xq2 | MomentKind::Q2Xq)
    }

    /// The integrand polynomial for this kind.
    pub fn polynomial(self, dim: usize, x: Option<&[C64]>) -> Result<MultiPoly> {
        let x = self.check_x(dim, x)?;
        let n = MultiPoly::norm_sq(dim);
        Ok(match self {
            MomentKind::Basic => MultiPoly::one(dim),
            MomentKind::Q2 => n,
            MomentKind::Q4 => &n * &n,
            MomentKind::Xq => MultiPoly::dot(x.expect("checked")),
            MomentKind::Xq2 => {
                let xq = MultiPoly::dot(x.expect("checked"));
                &xq * &xq
            }
            MomentKind::Q2Xq => &MultiPoly::dot(x.expect("checked")) * &n,
        })
    }

    fn check_x(self, dim: usize, x: Option<&[C64]>) -> Result<Option<&[C64]>> {
        match (self.needs_x(), x) {
            (true, None) => Err(Error::MomentArgument { kind: self.name(), reason: "requires x" }),
            (false, Some(_)) => Err(Error::MomentArgument { kind: self.name(), reason: "does not take x" }),
            (true, Some(v)) if v.len() != dim => Err(Error::DimensionMismatch { expected: dim, got: v.len() }),
            _ => Ok(x),
        }
    }
}

/// Closed-form moment of the given kind.
pub fn closed_moment(kind: MomentKind, w: &GaussianWeight, x: Option<&[C64]>) -> Result<C64> {
    let x = kind.check_x(w.dim(), x)?;
    let d = w.dim() as f64;
    let a = w.a();
    let bb = w.b_sq();
    let g = w.total();
    let xb = || -> C64 { x.expect("checked").iter().zip(w.b()).map(|(p, q)| p * q).sum() };
    let xx = || -> C64 { x.expect("checked").iter().map(|p| p * p).sum() };
    Ok(match kind {
        MomentKind::Basic => g,
        MomentKind::Q2 => g / a * (d / 2.0 + bb / a),
        MomentKind::Xq => g * xb() / a,
        MomentKind::Xq2 => g * (xx() / (2.0 * a) + xb() * xb() / (a * a)),
        MomentKind::Q2Xq => g * ((d + 2.0) / 2.0 + bb / a) * xb() / (a * a),
        MomentKind::Q4 => g / (a * a) * (d * (d + 2.0) / 4.0 + (d + 2.0) * bb / a + bb * bb / (a * a)),
    })
}

/// Neumaier-compensated complex sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: C64,
    comp: C64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: C64) {
        let re = neumaier(self.sum.re, x.re, &mut self.comp.re);
        let im = neumaier(self.sum.im, x.im, &mut self.comp.im);
        self.sum = C64::new(re, im);
    }

    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, x: f64, comp: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

/// `<P> = int P w / int w`: the Gaussian expectation of `p`.
///
/// Multiplying by [`GaussianWeight::total`] gives the integral itself; keeping
/// the two apart avoids overflow when `exp(|b|^2/a)` is extreme.
pub fn gaussian_expectation(p: &MultiPoly, w: &GaussianWeight) -> Result<C64> {
    if p.dim() != w.dim() {
        return Err(Error::DimensionMismatch { expected: w.dim(), got: p.dim() });
    }
    p.check_degree()?;
    let shifted = p.shift(&w.center());
    let two_a = 2.0 * w.a();
    // pair_moment[k] = (k-1)!! / (2a)^{k/2} for even k
    let max_deg = shifted.degree() as usize;
    let mut pair_moment = vec![C64::default(); max_deg + 1];
    pair_moment[0] = C64::new(1.0, 0.0);
    for k in (2..=max_deg).step_by(2) {
        pair_moment[k] = pair_moment[k - 2] * (k as f64 - 1.0) / two_a;
    }
    let mut acc = CompensatedSum::default();
    for (e, c) in shifted.terms() {
        if e.iter().any(|k| k % 2 == 1) {
            continue;
        }
        let term = e.iter().fold(*c, |t, &k| t * pair_moment[k as usize]);
        acc.add(term);
    }
    Ok(acc.value())
}

/// Exact `int d^D q P(q) exp(-a |q|^2 + 2 b.q)`.
pub fn integrate_poly_gaussian(p: &MultiPoly, w: &GaussianWeight) -> Result<C64> {
    Ok(gaussian_expectation(p, w)? * w.total())
}

/// Largest dimension the tensor-product oracle accepts.
pub const ORACLE_MAX_DIM: usize = 3;

/// Tensor-product Gauss-Hermite estimate of the same integral.
///
/// The grid is centred on the stationary point of the real part of the
/// exponent and scaled by `1/sqrt(Re a)`; the imaginary part of the exponent
/// is left in the integrand. Only decaying weights (`Re a > 0`) are accepted.
pub fn quadrature_oracle(p: &MultiPoly, w: &GaussianWeight, nodes: usize) -> Result<C64> {
    let dim = w.dim();
    if p.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
    }
    if w.a().re <= 0.0 {
        return Err(Error::OutOfDomain(format!("quadrature oracle needs Re(a) > 0, got {}", w.a())));
    }
    if dim > ORACLE_MAX_DIM {
        return Err(Error::OutOfDomain(format!("quadrature oracle supports D <= {ORACLE_MAX_DIM}, got {dim}")));
    }
    if nodes < 4 {
        return Err(Error::InvalidParameter(format!("quadrature oracle needs >= 4 nodes, got {nodes}")));
    }
    let ar = w.a().re;
    let scale = 1.0 / ar.sqrt();
    let center: Vec<f64> = w.b().iter().map(|b| b.re / ar).collect();
    let (x, wt) = gauss_hermite(nodes);

    let point_value = |idx: &[usize]| -> C64 {
        let mut q = [C64::default(); ORACLE_MAX_DIM];
        let mut grid_sq = 0.0;
        let mut weight = scale.powi(dim as i32);
        let mut expo = C64::default();
        for (axis, &i) in idx.iter().enumerate() {
            let qi = center[axis] + scale * x[i];
            q[axis] = C64::new(qi, 0.0);
            grid_sq += x[i] * x[i];
            weight *= wt[i];
            expo += -w.a() * qi * qi + 2.0 * w.b()[axis] * qi;
        }
        p.evaluate(&q[..dim]) * (expo + grid_sq).exp() * weight
    };

    // Parallel over slabs of the first axis; each slab sums its own sub-grid.
    let slabs: Vec<C64> = (0..nodes)
        .into_par_iter()
        .map(|i0| {
            let mut acc = CompensatedSum::default();
            let mut idx = vec![0usize; dim];
            idx[0] = i0;
            let inner = nodes.pow(dim as u32 - 1);
            for flat in 0..inner {
                let mut r = flat;
                for slot in idx.iter_mut().skip(1) {
                    *slot = r % nodes;
                    r /= nodes;
                }
                acc.add(point_value(&idx));
            }
            acc.value()
        })
        .collect();
    let mut total = CompensatedSum::default();
    for s in slabs {
        total.add(s);
    }
    Ok(total.value())
}
