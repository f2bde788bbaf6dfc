//! The modified uncertainty relation, its minimal length, and the
//! first-order momentum map `P_i = p_i (1 + alpha |p|^2)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{VecD, C64};

/// Momentum spreads and means for each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyState {
    pub dp: Vec<f64>,
    pub mean_p: Vec<f64>,
    pub alpha: f64,
    pub hbar: f64,
}

impl UncertaintyState {
    pub fn new(dp: Vec<f64>, mean_p: Vec<f64>, alpha: f64, hbar: f64) -> Result<Self> {
        if dp.len() != mean_p.len() {
            return Err(Error::DimensionMismatch { expected: dp.len(), got: mean_p.len() });
        }
        if dp.is_empty() {
            return Err(Error::InvalidParameter("uncertainty state needs dimension >= 1".into()));
        }
        if dp.iter().any(|x| *x < 0.0 || !x.is_finite()) {
            return Err(Error::InvalidParameter("momentum spreads must be finite and >= 0".into()));
        }
        if hbar <= 0.0 {
            return Err(Error::InvalidParameter("hbar must be positive".into()));
        }
        Ok(Self { dp, mean_p, alpha, hbar })
    }

    pub fn dim(&self) -> usize {
        self.dp.len()
    }
}

/// Lower bound on `dP_i dQ_i` for axis `axis` (0-based).
pub fn uncertainty_bound(s: &UncertaintyState, axis: usize) -> Result<f64> {
    if axis >= s.dim() {
        return Err(Error::OutOfDomain(format!("axis {axis} out of range for dimension {}", s.dim())));
    }
    let spread: f64 = s.dp.iter().map(|x| x * x).sum();
    let mean: f64 = s.mean_p.iter().map(|x| x * x).sum();
    let own = s.dp[axis].powi(2) + s.mean_p[axis].powi(2);
    Ok(0.5 * s.hbar * (1.0 + s.alpha * (spread + mean) + 2.0 * s.alpha * own))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimalLength {
    /// `sqrt(3 alpha) hbar`
    pub dq_min: f64,
    /// Momentum spread at which the bound is attained, `1/sqrt(3 alpha)`.
    pub dp_star: Option<f64>,
}

pub fn minimal_length(alpha: f64, hbar: f64) -> Result<MinimalLength> {
    if alpha < 0.0 || hbar <= 0.0 {
        return Err(Error::InvalidParameter("need alpha >= 0 and hbar > 0".into()));
    }
    let dp_star = (alpha > 0.0).then(|| 1.0 / (3.0 * alpha).sqrt());
    Ok(MinimalLength { dq_min: (3.0 * alpha * hbar * hbar).sqrt(), dp_star })
}

/// One-dimensional bound `dQ >= (hbar / 2 dP)(1 + 3 alpha dP^2)` at `<P> = 0`.
pub fn bound_at(alpha: f64, hbar: f64, dp: f64) -> f64 {
    hbar / (2.0 * dp) * (1.0 + 3.0 * alpha * dp * dp)
}

/// `(dP, dQ_bound)` pairs over a grid of positive momentum spreads.
pub fn bound_curve(alpha: f64, hbar: f64, dp_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    dp_grid
        .iter()
        .map(|&dp| {
            if dp <= 0.0 || !dp.is_finite() {
                Err(Error::InvalidParameter(format!("grid entries must be positive, got {dp}")))
            } else {
                Ok((dp, bound_at(alpha, hbar, dp)))
            }
        })
        .collect()
}

pub fn momentum_map(p: &VecD, alpha: f64) -> VecD {
    let factor = 1.0 + alpha * p.norm_sq();
    p.scale(factor)
}

/// Default finite-difference step for [`commutator_check`].
pub const DEFAULT_COMMUTATOR_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorCheck {
    /// `i hbar dP_j/dp_i` from Richardson-extrapolated central differences.
    pub bracket: DMatrix<C64>,
    /// `i hbar (delta_ij + alpha delta_ij |P|^2 + 2 alpha P_i P_j)`.
    pub target: DMatrix<C64>,
    /// `bracket - target`.
    pub defect: DMatrix<C64>,
}

impl CommutatorCheck {
    pub fn defect_norm(&self) -> f64 {
        self.defect.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Compares `[q_i, P_j(p)] = i hbar dP_j/dp_i` against the modified bracket.
pub fn commutator_check(p: &VecD, alpha: f64, hbar: f64, step: f64) -> Result<CommutatorCheck> {
    if step <= 0.0 {
        return Err(Error::InvalidParameter("finite-difference step must be positive".into()));
    }
    let d = p.dim();
    let big_p = momentum_map(p, alpha);
    let big_p_sq = big_p.norm_sq();
    let ih = C64::new(0.0, hbar);

    let central = |i: usize, j: usize, h: f64| -> f64 {
        let mut plus = p.to_vec();
        let mut minus = p.to_vec();
        plus[i] += h;
        minus[i] -= h;
        let fp = momentum_map(&VecD::from(plus), alpha)[j];
        let fm = momentum_map(&VecD::from(minus), alpha)[j];
        (fp - fm) / (2.0 * h)
    };

    let bracket = DMatrix::from_fn(d, d, |i, j| {
        let coarse = central(i, j, step);
        let fine = central(i, j, step / 2.0);
        ih * ((4.0 * fine - coarse) / 3.0)
    });
    let target = DMatrix::from_fn(d, d, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        ih * (delta + alpha * delta * big_p_sq + 2.0 * alpha * big_p[i] * big_p[j])
    });
    let defect = &bracket - &target;
    Ok(CommutatorCheck { bracket, target, defect })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        let s = UncertaintyState::new(vec![1.0], vec![0.0], 1.0, 1.0).unwrap();
        assert_eq!(uncertainty_bound(&s, 0).unwrap(), 2.0);
        let s = UncertaintyState::new(vec![0.3, 2.0], vec![1.0, -4.0], 0.0, 1.0).unwrap();
        assert_eq!(uncertainty_bound(&s, 1).unwrap(), 0.5);
        let s = UncertaintyState::new(vec![1.0, 1.0], vec![0.0, 0.0], 0.1, 1.0).unwrap();
        assert!((uncertainty_bound(&s, 0).unwrap() - 0.7).abs() < 1e-15);
        assert!(uncertainty_bound(&s, 2).is_err());
    }

    #[test]
    fn bound_monotone_in_alpha() {
        let mut last = 0.0;
        for k in 0..20 {
            let s = UncertaintyState::new(vec![0.4, 1.3], vec![0.2, -0.1], 0.05 * k as f64, 1.0).unwrap();
            let b = uncertainty_bound(&s, 0).unwrap();
            assert!(b >= last);
            last = b;
        }
    }

    #[test]
    fn minimal_length_examples() {
        let ml = minimal_length(1.0, 1.0).unwrap();
        assert!((ml.dq_min - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(minimal_length(0.0, 1.0).unwrap(), MinimalLength { dq_min: 0.0, dp_star: None });
        assert!((minimal_length(0.03, 2.0).unwrap().dq_min - 0.6).abs() < 1e-15);
    }

    #[test]
    fn minimal_length_matches_brute_force_minimum() {
        // Dense scan of the bound, independent of the closed form.
        let (alpha, hbar) = (0.03, 2.0);
        let min = (1..200_000)
            .map(|k| bound_at(alpha, hbar, 1e-4 * k as f64))
            .fold(f64::INFINITY, f64::min);
        assert!((min - 0.6).abs() < 1e-8);
    }

    #[test]
    fn curve_examples() {
        let c = bound_curve(1.0, 1.0, &[1.0 / 3f64.sqrt(), 1.0]).unwrap();
        assert!((c[0].1 - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(c[1].1, 2.0);
        assert_eq!(bound_curve(0.0, 1.0, &[1.0]).unwrap()[0].1, 0.5);
        assert!(bound_curve(1.0, 1.0, &[0.5, 0.0]).is_err());
    }

    #[test]
    fn curve_never_below_minimal_length() {
        let ml = minimal_length(0.7, 1.3).unwrap();
        let grid: Vec<f64> = (1..5000).map(|k| 0.002 * k as f64).collect();
        for (_, dq) in bound_curve(0.7, 1.3, &grid).unwrap() {
            assert!(dq >= ml.dq_min * (1.0 - 1e-15));
        }
        let at_star = bound_at(0.7, 1.3, ml.dp_star.unwrap());
        assert!((at_star - ml.dq_min).abs() < 1e-14);
    }

    #[test]
    fn momentum_map_examples() {
        assert_eq!(momentum_map(&VecD::from([1.0, 0.0]), 0.1).to_vec(), vec![1.1, 0.0]);
        assert_eq!(momentum_map(&VecD::from([0.0, 0.0]), 0.1).to_vec(), vec![0.0, 0.0]);
        assert!((momentum_map(&VecD::from([2.0]), 0.01)[0] - 2.08).abs() < 1e-15);
    }

    #[test]
    fn commutator_examples() {
        let p = VecD::from([1.0, 1.0]);
        let c = commutator_check(&p, 0.01, 1.0, DEFAULT_COMMUTATOR_STEP).unwrap();
        assert!((c.bracket[(0, 0)] - C64::new(0.0, 1.04)).norm() < 1e-10);
        assert!((c.bracket[(0, 1)] - C64::new(0.0, 0.02)).norm() < 1e-10);
        assert!(c.defect_norm() < 1e-2);

        let c0 = commutator_check(&p, 0.0, 1.0, DEFAULT_COMMUTATOR_STEP).unwrap();
        let canonical = DMatrix::from_fn(2, 2, |i, j| C64::new(0.0, if i == j { 1.0 } else { 0.0 }));
        assert_eq!(c0.target, canonical);
        assert!((&c0.bracket - &canonical).iter().all(|z| z.norm() < 1e-11));
        assert!(commutator_check(&p, 0.01, 1.0, 0.0).is_err());
    }

    #[test]
    fn commutator_defect_scales_quadratically() {
        let p = VecD::from([0.7, -1.2, 0.4]);
        for alpha in [1e-2, 4e-3, 1e-3] {
            let big = commutator_check(&p, alpha, 1.0, DEFAULT_COMMUTATOR_STEP).unwrap().defect_norm();
            let small = commutator_check(&p, alpha / 2.0, 1.0, DEFAULT_COMMUTATOR_STEP).unwrap().defect_norm();
            let ratio = big / small;
            assert!((ratio - 4.0).abs() < 0.4, "alpha={alpha} ratio={ratio}");
        }
    }
}
