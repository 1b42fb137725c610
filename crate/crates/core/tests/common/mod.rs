//! Brute-force reference sums written straight from the defining formulas,
//! independent of the library's kernels.
#![allow(dead_code)]

use kawahara::{PhysicalParams, SpectralField};
use num_complex::Complex64;

pub type C = Complex64;

pub const I: C = C::new(0.0, 1.0);

/// `c_k` for any integer `k`, zero outside `1 <= |k| <= kmax`.
pub fn c(u: &SpectralField, k: i64) -> C {
    let kmax = u.kmax() as i64;
    if k == 0 || k.abs() > kmax {
        C::new(0.0, 0.0)
    } else if k > 0 {
        u.coeffs()[(k - 1) as usize]
    } else {
        u.coeffs()[(-k - 1) as usize].conj()
    }
}

fn sym(a: i64, b: i64, p: &PhysicalParams) -> f64 {
    let (a, b) = (a as f64, b as f64);
    5.0 * p.alpha() * (a * a + b * b + a * b) - 3.0 * p.beta()
}

pub fn nonlinear(u: &SpectralField) -> Vec<C> {
    let k_max = u.kmax() as i64;
    (1..=k_max)
        .map(|k| {
            let mut s = C::new(0.0, 0.0);
            for k1 in -k_max..=k_max {
                s += c(u, k1) * c(u, k - k1);
            }
            -I * (k as f64 / 2.0) * s
        })
        .collect()
}

pub fn bilinear(phi: &SpectralField, psi: &SpectralField, p: &PhysicalParams) -> Vec<C> {
    let k_max = phi.kmax() as i64;
    (1..=k_max)
        .map(|k| {
            let mut s = C::new(0.0, 0.0);
            for k1 in -k_max..=k_max {
                let k2 = k - k1;
                if k1 == 0 || k2 == 0 || k2.abs() > k_max {
                    continue;
                }
                s += phi_psi(phi, psi, k1, k2) / ((k1 * k2) as f64 * sym(k1, k2, p));
            }
            -0.5 * s
        })
        .collect()
}

fn phi_psi(phi: &SpectralField, psi: &SpectralField, k1: i64, k2: i64) -> C {
    c(phi, k1) * c(psi, k2)
}

pub fn rho(u: &SpectralField, p: &PhysicalParams) -> Vec<C> {
    (1..=u.kmax() as i64)
        .map(|k| {
            let uk = c(u, k);
            I * uk.norm_sqr() * uk / (2.0 * (15.0 * p.alpha() * (k * k) as f64 - 3.0 * p.beta()) * k as f64)
        })
        .collect()
}

pub fn sigma(u: &SpectralField, p: &PhysicalParams) -> Vec<C> {
    let k_max = u.kmax() as i64;
    (1..=k_max)
        .map(|k| {
            let mut s = 0.0;
            for j in -k_max..=k_max {
                if j == 0 || j.abs() == k {
                    continue;
                }
                let den = j as f64 * (5.0 * p.alpha() * (k * k - k * j + j * j) as f64 - 3.0 * p.beta());
                s += c(u, j).norm_sqr() / den;
            }
            -I * c(u, k) * s
        })
        .collect()
}

pub fn remainder(u: &SpectralField, p: &PhysicalParams) -> Vec<C> {
    let k_max = u.kmax() as i64;
    (1..=k_max)
        .map(|k| {
            let mut s = C::new(0.0, 0.0);
            for k1 in -k_max..=k_max {
                for k2 in -k_max..=k_max {
                    let k3 = k - k1 - k2;
                    if k1 == 0 || k2 == 0 || k3 == 0 || k3.abs() > k_max {
                        continue;
                    }
                    if (k1 + k2) * (k2 + k3) * (k3 + k1) == 0 {
                        continue;
                    }
                    let m = k2 + k3;
                    let den = k1 as f64 * (5.0 * p.alpha() * (k1 * k1 + m * m + k1 * m) as f64 - 3.0 * p.beta());
                    s += c(u, k1) * c(u, k2) * c(u, k3) / den;
                }
            }
            -0.5 * I * s
        })
        .collect()
}

/// Largest per-mode distance between a field and a reference list.
pub fn max_dev(a: &SpectralField, b: &[C]) -> f64 {
    assert_eq!(a.kmax(), b.len());
    a.coeffs().iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn params(alpha: f64, beta: f64, gamma: f64) -> PhysicalParams {
    PhysicalParams::new(alpha, beta, gamma).unwrap()
}

pub fn cosine(kmax: usize, k: i64, coeff: f64) -> SpectralField {
    SpectralField::from_fn(kmax, |j| if j == k { C::new(coeff, 0.0) } else { C::new(0.0, 0.0) }).unwrap()
}
