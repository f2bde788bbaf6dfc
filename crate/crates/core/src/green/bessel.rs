//! Modified Bessel functions of the second kind, orders 0 and 1, for real
//! positive argument.
//!
//! Regimes: power series with the logarithmic term for `z <= 2`, Steed's
//! continued fraction (Temme's form) for `2 < z <= 25`, and the asymptotic
//! expansion for `z > 25`.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_MAX: f64 = 2.0;
const FRACTION_MAX: f64 = 25.0;
const EPS: f64 = 1e-17;
const MAX_ITER: usize = 10_000;

/// `K_nu(z)` for `nu` in `{0, 1}` and `z > 0`.
pub fn bessel_k(nu: u32, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::OutOfDomain(format!("bessel_k needs finite z > 0, got {z}")));
    }
    if nu > 1 {
        return Err(Error::InvalidParameter(format!("bessel_k supports orders 0 and 1, got {nu}")));
    }
    let (k0, k1) = if z <= SERIES_MAX {
        series(z)
    } else if z <= FRACTION_MAX {
        steed(z)?
    } else {
        asymptotic(z)
    };
    Ok(if nu == 0 { k0 } else { k1 })
}

pub fn bessel_k0(z: f64) -> Result<f64> {
    bessel_k(0, z)
}

pub fn bessel_k1(z: f64) -> Result<f64> {
    bessel_k(1, z)
}

fn series(z: f64) -> (f64, f64) {
    let y = z * z / 4.0;
    let log_term = (z / 2.0).ln();
    // term0 = y^k / (k!)^2, term1 = y^k / (k! (k+1)!), harmonic = H_k.
    let (mut term0, mut term1, mut harmonic) = (1.0, 1.0, 0.0);
    let (mut i0, mut i1) = (0.0, 0.0);
    let (mut s0, mut s1) = (0.0, 0.0);
    for k in 0..200 {
        let kf = k as f64;
        if k > 0 {
            term0 *= y / (kf * kf);
            term1 *= y / (kf * (kf + 1.0));
            harmonic += 1.0 / kf;
        }
        let psi1 = -EULER_GAMMA + harmonic;
        let psi2 = psi1 + 1.0 / (kf + 1.0);
        i0 += term0;
        i1 += term1;
        s0 += term0 * harmonic;
        s1 += term1 * (psi1 + psi2);
        if term0 < EPS * i0 && term1 < EPS * i1 {
            break;
        }
    }
    let k0 = -(log_term + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / z + log_term * (z / 2.0) * i1 - z / 4.0 * s1;
    (k0, k1)
}

fn steed(x: f64) -> Result<(f64, f64)> {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let (mut q1, mut q2) = (0.0, 1.0);
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut converged = false;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergent(format!("bessel continued fraction at z = {x}")));
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    Ok((k0, k1))
}

fn asymptotic(z: f64) -> (f64, f64) {
    let scale = (std::f64::consts::PI / (2.0 * z)).sqrt() * (-z).exp();
    let sum = |mu: f64| {
        let (mut term, mut total) = (1.0_f64, 1.0_f64);
        for k in 1..60 {
            let odd = (2 * k - 1) as f64;
            let next = term * (mu - odd * odd) / (k as f64 * 8.0 * z);
            if next.abs() >= term.abs() {
                break;
            }
            term = next;
            total += term;
            if term.abs() < EPS * total.abs() {
                break;
            }
        }
        total
    };
    (scale * sum(0.0), scale * sum(4.0))
}
