//! Parameter and boundary-data value types shared by every module.

use std::ops::{Add, Deref, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

/// Principal branch `z^p = exp(p Log z)`, with `arg z` in `(-pi, pi]`.
pub fn principal_pow(z: C64, p: f64) -> C64 {
    (z.ln() * p).exp()
}

/// Physical parameters of a run. `omega == 0` selects the free particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub m: f64,
    pub hbar: f64,
    pub omega: f64,
    pub alpha: f64,
    pub dim: usize,
}

impl ModelParams {
    pub fn new(m: f64, hbar: f64, omega: f64, alpha: f64, dim: usize) -> Result<Self> {
        let p = Self { m, hbar, omega, alpha, dim };
        p.validate()?;
        Ok(p)
    }

    /// `m = hbar = 1`, free particle, `alpha = 0`.
    pub fn natural(dim: usize) -> Self {
        Self { m: 1.0, hbar: 1.0, omega: 0.0, alpha: 0.0, dim }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn with_omega(self, omega: f64) -> Self {
        Self { omega, ..self }
    }

    pub fn with_dim(self, dim: usize) -> Self {
        Self { dim, ..self }
    }

    pub fn is_free(&self) -> bool {
        self.omega == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.m, self.hbar, self.omega, self.alpha].iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("all parameters must be finite".into()));
        }
        if self.m <= 0.0 {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {}", self.m)));
        }
        if self.hbar <= 0.0 {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {}", self.hbar)));
        }
        if self.omega < 0.0 {
            return Err(Error::InvalidParameter(format!("omega must be >= 0, got {}", self.omega)));
        }
        if self.alpha < 0.0 {
            return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if self.dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        Ok(())
    }
}

/// A real D-vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VecD(Vec<f64>);

impl VecD {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("vector components must be finite".into()));
        }
        Ok(Self(components))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn dot(&self, other: &VecD) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, s: f64) -> VecD {
        VecD(self.0.iter().map(|x| s * x).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for VecD {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[f64; N]> for VecD {
    fn from(v: [f64; N]) -> Self {
        Self(v.to_vec())
    }
}

impl Deref for VecD {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Add for &VecD {
    type Output = VecD;

    fn add(self, rhs: &VecD) -> VecD {
        VecD(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &VecD {
    type Output = VecD;

    fn sub(self, rhs: &VecD) -> VecD {
        VecD(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeKind {
    Real,
    Euclidean,
}

/// Elapsed time, either real `T` or Euclidean `tau` stored as `T = -i tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeArg {
    value: C64,
    kind: TimeKind,
}

impl TimeArg {
    pub fn real(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidParameter("time must be finite".into()));
        }
        if t == 0.0 {
            return Err(Error::ZeroTime);
        }
        Ok(Self { value: C64::new(t, 0.0), kind: TimeKind::Real })
    }

    pub fn euclidean(tau: f64) -> Result<Self> {
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::InvalidParameter(format!("euclidean time must be > 0, got {tau}")));
        }
        Ok(Self { value: C64::new(0.0, -tau), kind: TimeKind::Euclidean })
    }

    /// Same kind, magnitude `t` (real `T` or `tau`).
    pub fn with_magnitude(&self, t: f64) -> Result<Self> {
        match self.kind {
            TimeKind::Real => Self::real(t),
            TimeKind::Euclidean => Self::euclidean(t),
        }
    }

    /// The complex time `T` entering every formula.
    pub fn value(&self) -> C64 {
        self.value
    }

    pub fn kind(&self) -> TimeKind {
        self.kind
    }

    /// `T` for real time, `tau` for Euclidean time.
    pub fn magnitude(&self) -> f64 {
        match self.kind {
            TimeKind::Real => self.value.re,
            TimeKind::Euclidean => -self.value.im,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Endpoints {
    pub q0: VecD,
    pub qf: VecD,
    pub time: TimeArg,
}

impl Endpoints {
    pub fn new(q0: VecD, qf: VecD, time: TimeArg) -> Result<Self> {
        if q0.dim() != qf.dim() {
            return Err(Error::DimensionMismatch { expected: q0.dim(), got: qf.dim() });
        }
        Ok(Self { q0, qf, time })
    }

    pub fn dim(&self) -> usize {
        self.q0.dim()
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: self.dim() });
        }
        Ok(())
    }

    pub fn swapped(&self) -> Self {
        Self { q0: self.qf.clone(), qf: self.q0.clone(), time: self.time }
    }

    pub fn with_time(&self, time: TimeArg) -> Self {
        Self { time, ..self.clone() }
    }
}

/// `q_f - q_0` together with its squared norm.
pub fn displacement(e: &Endpoints) -> Result<(VecD, f64)> {
    if e.q0.dim() != e.qf.dim() {
        return Err(Error::DimensionMismatch { expected: e.q0.dim(), got: e.qf.dim() });
    }
    let d = &e.qf - &e.q0;
    let n = d.norm_sq();
    Ok((d, n))
}
