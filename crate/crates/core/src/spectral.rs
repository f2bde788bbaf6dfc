//! Plane-wave dispersion, the first-order oscillator spectrum, and a
//! number-basis diagonalization that checks it.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, VecD};

/// Smallest basis accepted by [`oscillator_matrix_oracle`].
pub const MIN_BASIS: usize = 16;
/// Largest basis per axis.
pub const MAX_BASIS: usize = 128;
/// Allowed change of a requested level when the basis is doubled.
pub const CONVERGENCE_TOL: f64 = 1e-10;

/// `hbar^2 |k|^2 / 2m + alpha hbar^4 |k|^4 / m`.
pub fn plane_wave_energy(k: &VecD, params: &ModelParams) -> f64 {
    let k2 = k.norm_sq();
    let (m, hbar) = (params.m, params.hbar);
    hbar * hbar * k2 / (2.0 * m) + params.alpha * hbar.powi(4) * k2 * k2 / m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub n1: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n2: Option<u32>,
    pub value: f64,
}

/// `hbar omega (n1 + n2 + 1) + (alpha m hbar^2 omega^2 / 2)[3 N^2 + 5 N - 2 n1 n2 + 4]`, `N = n1 + n2`.
pub fn sho_energy_2d(n1: u32, n2: u32, params: &ModelParams) -> EnergyLevel {
    let (a, b) = (n1 as f64, n2 as f64);
    let n = a + b;
    let scale = params.m * (params.hbar * params.omega).powi(2);
    let bracket = 3.0 * n * n + 5.0 * n - 2.0 * a * b + 4.0;
    let value = params.hbar * params.omega * (n + 1.0) + params.alpha * scale / 2.0 * bracket;
    EnergyLevel { n1, n2: Some(n2), value }
}

/// `hbar omega (n + 1/2) + (3/4) alpha m hbar^2 omega^2 (2 n^2 + 2 n + 1)`.
pub fn sho_energy_1d(n: u32, params: &ModelParams) -> EnergyLevel {
    let k = n as f64;
    let scale = params.m * (params.hbar * params.omega).powi(2);
    let value = params.hbar * params.omega * (k + 0.5) + 0.75 * params.alpha * scale * (2.0 * k * k + 2.0 * k + 1.0);
    EnergyLevel { n1: n, n2: None, value }
}

/// First-order levels in ascending energy, up to `count` of them.
pub fn formula_levels(params: &ModelParams, count: usize) -> Result<Vec<EnergyLevel>> {
    let mut out = Vec::new();
    match params.dim {
        1 => out.extend((0..count as u32).map(|n| sho_energy_1d(n, params))),
        2 => {
            let mut shell = 0u32;
            while out.len() < count {
                out.extend((0..=shell).map(|n1| sho_energy_2d(n1, shell - n1, params)));
                shell += 1;
            }
        }
        d => return Err(Error::InvalidParameter(format!("spectrum supports D = 1 or 2, got {d}"))),
    }
    out.sort_by(|x, y| x.value.total_cmp(&y.value));
    out.truncate(count);
    Ok(out)
}

/// `p^2` and `p^4` on one axis in the first `n` number states, in units of
/// `m hbar omega / 2` and its square.
fn axis_momentum_powers(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let big = n + 2;
    let mut p2 = DMatrix::zeros(big, big);
    for i in 0..big {
        p2[(i, i)] = (2 * i + 1) as f64;
        if i + 2 < big {
            let v = -(((i + 1) * (i + 2)) as f64).sqrt();
            p2[(i, i + 2)] = v;
            p2[(i + 2, i)] = v;
        }
    }
    // States above n - 1 only feed p^4 through the two extra rows.
    let p4 = (&p2 * &p2).view((0, 0), (n, n)).into_owned();
    (p2.view((0, 0), (n, n)).into_owned(), p4)
}

/// Eigenvalues of one parity block of the Hamiltonian, ascending.
fn block_eigenvalues(params: &ModelParams, n: usize, parity: &[usize]) -> Vec<f64> {
    let (p2, p4) = axis_momentum_powers(n);
    let unit = params.m * params.hbar * params.omega / 2.0;
    let quartic = params.alpha / params.m * unit * unit;
    let hw = params.hbar * params.omega;
    let states: Vec<Vec<usize>> = match params.dim {
        1 => (parity[0]..n).step_by(2).map(|i| vec![i]).collect(),
        _ => {
            let mut s = Vec::new();
            for i in (parity[0]..n).step_by(2) {
                for j in (parity[1]..n).step_by(2) {
                    s.push(vec![i, j]);
                }
            }
            s
        }
    };
    let size = states.len();
    let h = DMatrix::from_fn(size, size, |r, c| {
        let (a, b) = (&states[r], &states[c]);
        let mut p4_total = 0.0;
        if a.len() == 1 {
            p4_total = p4[(a[0], b[0])];
        } else {
            if a[1] == b[1] {
                p4_total += p4[(a[0], b[0])];
            }
            if a[0] == b[0] {
                p4_total += p4[(a[1], b[1])];
            }
            p4_total += 2.0 * p2[(a[0], b[0])] * p2[(a[1], b[1])];
        }
        let diag = if r == c { hw * (a.iter().sum::<usize>() as f64 + a.len() as f64 / 2.0) } else { 0.0 };
        diag + quartic * p4_total
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn all_eigenvalues(params: &ModelParams, n: usize) -> Vec<f64> {
    let parities: Vec<Vec<usize>> = match params.dim {
        1 => vec![vec![0], vec![1]],
        _ => vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]],
    };
    let mut ev: Vec<f64> = parities.iter().flat_map(|p| block_eigenvalues(params, n, p)).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Lowest `levels` eigenvalues of `|p|^2/2m + (alpha/m)|p|^4 + (m omega^2/2)|q|^2`
/// in a truncated number basis with `basis_per_axis` states per axis.
///
/// The result is accepted only if doubling the basis moves every requested
/// level by less than [`CONVERGENCE_TOL`].
pub fn oscillator_matrix_oracle(params: &ModelParams, basis_per_axis: usize, levels: usize) -> Result<Vec<f64>> {
    if !(1..=2).contains(&params.dim) {
        return Err(Error::InvalidParameter(format!("spectrum supports D = 1 or 2, got {}", params.dim)));
    }
    if params.is_free() {
        return Err(Error::InvalidParameter("the number basis needs omega > 0".into()));
    }
    if basis_per_axis < MIN_BASIS || 2 * basis_per_axis > MAX_BASIS {
        return Err(Error::InvalidParameter(format!(
            "basis per axis must lie in [{MIN_BASIS}, {}], got {basis_per_axis}",
            MAX_BASIS / 2
        )));
    }
    let available = basis_per_axis.pow(params.dim as u32);
    if levels == 0 || levels > available / 4 {
        return Err(Error::InvalidParameter(format!("levels must lie in [1, {}], got {levels}", available / 4)));
    }
    let coarse = all_eigenvalues(params, basis_per_axis);
    let fine = all_eigenvalues(params, 2 * basis_per_axis);
    let scale = params.hbar * params.omega;
    for (i, (c, f)) in coarse.iter().zip(&fine).take(levels).enumerate() {
        if (c - f).abs() >= CONVERGENCE_TOL * scale.max(f.abs()) {
            return Err(Error::NonConvergent(format!(
                "level {i} moved by {:e} when the basis was doubled from {basis_per_axis}",
                (c - f).abs()
            )));
        }
    }
    Ok(fine[..levels].to_vec())
}

/// Formula and oracle values for one degenerate shell `n1 + n2 = shell` in two dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellComparison {
    pub shell: u32,
    /// Formula values, ordered by `n1`.
    pub formula: Vec<EnergyLevel>,
    /// Oracle eigenvalues of the shell, ascending.
    pub oracle: Vec<f64>,
    /// `(E - hbar omega (shell + 1)) / (alpha m hbar^2 omega^2)` for each oracle value.
    pub oracle_shift_coefficients: Vec<f64>,
}

pub fn shell_comparison(params: &ModelParams, shell: u32, basis_per_axis: usize) -> Result<ShellComparison> {
    if params.dim != 2 {
        return Err(Error::InvalidParameter("shell comparison is two-dimensional".into()));
    }
    if params.alpha == 0.0 {
        return Err(Error::InvalidParameter("shell comparison needs alpha != 0".into()));
    }
    let start = (shell * (shell + 1) / 2) as usize;
    let width = shell as usize + 1;
    let all = oscillator_matrix_oracle(params, basis_per_axis, start + width)?;
    let oracle = all[start..].to_vec();
    let base = params.hbar * params.omega * (shell as f64 + 1.0);
    let unit = params.alpha * params.m * (params.hbar * params.omega).powi(2);
    Ok(ShellComparison {
        shell,
        formula: (0..=shell).map(|n1| sho_energy_2d(n1, shell - n1, params)).collect(),
        oracle_shift_coefficients: oracle.iter().map(|e| (e - base) / unit).collect(),
        oracle,
    })
}
