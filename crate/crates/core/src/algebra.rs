//! The small amount of algebra shared between numeric evaluation and
//! polynomial construction.
//!
//! Actions and prefactors depend on the endpoints only through the rotation
//! invariants `|x|^2`, `|y|^2` and `x.y`. Writing each formula once over a
//! generic [`Ring`] lets the same code produce a number (for `C64`) or a
//! polynomial in an integration variable (for [`MultiPoly`]).

use std::ops::{Add, Mul, Sub};

use crate::model::{VecD, C64};
use crate::poly::MultiPoly;

pub trait Ring: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<C64, Output = Self> {
    /// The constant `c` in the same ring (and dimension) as `self`.
    fn constant_like(&self, c: C64) -> Self;
}

impl Ring for C64 {
    fn constant_like(&self, c: C64) -> Self {
        c
    }
}

impl Ring for MultiPoly {
    fn constant_like(&self, c: C64) -> Self {
        MultiPoly::constant(self.dim(), c)
    }
}

/// `|q0|^2`, `|qf|^2` and `q0.qf` for an ordered endpoint pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairInvariants<R> {
    pub n0: R,
    pub nf: R,
    pub dot: R,
}

impl<R: Ring> PairInvariants<R> {
    /// `|qf - q0|^2`
    pub fn separation_sq(&self) -> R {
        self.n0.clone() + self.nf.clone() - self.dot.clone() * C64::new(2.0, 0.0)
    }

    pub fn norm_sum(&self) -> R {
        self.n0.clone() + self.nf.clone()
    }
}

impl PairInvariants<C64> {
    pub fn numeric(q0: &[f64], qf: &[f64]) -> Self {
        let n0: f64 = q0.iter().map(|x| x * x).sum();
        let nf: f64 = qf.iter().map(|x| x * x).sum();
        let dot: f64 = q0.iter().zip(qf).map(|(a, b)| a * b).sum();
        Self { n0: n0.into(), nf: nf.into(), dot: dot.into() }
    }

    pub fn of(q0: &VecD, qf: &VecD) -> Self {
        Self::numeric(q0, qf)
    }
}

/// Which endpoint is the integration variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeSlot {
    Initial,
    Final,
}

impl PairInvariants<MultiPoly> {
    /// Invariants with one endpoint replaced by the variable `q`.
    pub fn with_variable(fixed: &[f64], slot: FreeSlot) -> Self {
        let dim = fixed.len();
        let fixed_c: Vec<C64> = fixed.iter().map(|&x| x.into()).collect();
        let n_fixed = MultiPoly::constant(dim, fixed.iter().map(|x| x * x).sum::<f64>().into());
        let n_var = MultiPoly::norm_sq(dim);
        let dot = MultiPoly::dot(&fixed_c);
        match slot {
            FreeSlot::Initial => Self { n0: n_var, nf: n_fixed, dot },
            FreeSlot::Final => Self { n0: n_fixed, nf: n_var, dot },
        }
    }
}
