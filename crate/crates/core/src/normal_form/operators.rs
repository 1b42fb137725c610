use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{nonresonance_witness, PhysicalParams};
use crate::spectral::SpectralField;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NonresonanceCheck {
    pub nonresonant: bool,
    pub witness: Option<(i64, i64)>,
}

/// Searches nonzero `|k1|, |k2| <= kbound` for `3 beta / (5 alpha) = k1^2 + k2^2 + k1 k2`.
/// A nonpositive ratio always passes. Rational parameters are compared exactly.
pub fn check_nonresonance(p: &PhysicalParams, kbound: i64) -> NonresonanceCheck {
    let witness = nonresonance_witness(p.alpha(), p.beta(), kbound.max(1));
    NonresonanceCheck {
        nonresonant: witness.is_none(),
        witness,
    }
}

/// `5 alpha (a^2 + b^2 + a b) - 3 beta`.
#[inline]
pub fn pair_symbol(a: i64, b: i64, p: &PhysicalParams) -> f64 {
    let (a, b) = (a as f64, b as f64);
    5.0 * p.alpha() * (a * a + b * b + a * b) - 3.0 * p.beta()
}

#[inline]
fn at(c: &[Complex64], k: i64) -> Complex64 {
    let a = k.unsigned_abs() as usize;
    if a == 0 || a > c.len() {
        ZERO
    } else if k > 0 {
        c[a - 1]
    } else {
        c[a - 1].conj()
    }
}

fn vanishing(indices: &[i64]) -> Error {
    Error::VanishingDenominator {
        indices: indices.to_vec(),
    }
}

/// Bilinear normal-form operator
/// `B(phi, psi)_k = -1/2 sum_{k1 + k2 = k} phi_{k1} psi_{k2} / (k1 k2 D(k1, k2))`
/// with `D` from [`pair_symbol`], summed over `0 < |k1|, |k2| <= kmax`.
pub fn normal_form_bilinear(phi: &SpectralField, psi: &SpectralField, p: &PhysicalParams) -> Result<SpectralField> {
    if phi.kmax() != psi.kmax() {
        return Err(Error::InvalidParams("bilinear operands differ in kmax".into()));
    }
    let kmax = phi.kmax() as i64;
    let (a, b) = (phi.coeffs(), psi.coeffs());
    let out: Result<Vec<Complex64>> = (1..=kmax)
        .map(|k| {
            let mut s = ZERO;
            for k1 in (k - kmax)..=kmax {
                let k2 = k - k1;
                if k1 == 0 || k2 == 0 {
                    continue;
                }
                let d = pair_symbol(k1, k2, p);
                if d == 0.0 {
                    return Err(vanishing(&[k1, k2, k]));
                }
                s += at(a, k1) * at(b, k2) / ((k1 * k2) as f64 * d);
            }
            Ok(-0.5 * s)
        })
        .collect();
    Ok(SpectralField::from_raw(out?))
}

/// Resonant cubic self-interaction `i |u_k|^2 u_k / (2 (15 alpha k^2 - 3 beta) k)`.
pub fn resonant_self(u: &SpectralField, p: &PhysicalParams) -> Result<SpectralField> {
    let out: Result<Vec<Complex64>> = u
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = i as i64 + 1;
            let kf = k as f64;
            let d = 15.0 * p.alpha() * kf * kf - 3.0 * p.beta();
            if d == 0.0 {
                return Err(vanishing(&[-k, k, k]));
            }
            Ok(Complex64::new(0.0, c.norm_sqr()) * c / (2.0 * d * kf))
        })
        .collect();
    Ok(SpectralField::from_raw(out?))
}

/// Resonant pair interaction
/// `-i u_k sum_{|j| != |k|} |u_j|^2 / (j (5 alpha (k^2 - k j + j^2) - 3 beta))`.
pub fn resonant_pair(u: &SpectralField, p: &PhysicalParams) -> Result<SpectralField> {
    let kmax = u.kmax() as i64;
    let c = u.coeffs();
    let out: Result<Vec<Complex64>> = (1..=kmax)
        .map(|k| {
            let mut s = 0.0;
            for j in -kmax..=kmax {
                if j == 0 || j.abs() == k {
                    continue;
                }
                let d = pair_symbol(k, -j, p);
                if d == 0.0 {
                    return Err(vanishing(&[j, -j, k]));
                }
                s += at(c, j).norm_sqr() / (j as f64 * d);
            }
            Ok(Complex64::new(0.0, -s) * c[k as usize - 1])
        })
        .collect();
    Ok(SpectralField::from_raw(out?))
}

/// Nonresonant trilinear remainder
/// `R(u)_k = -(i/2) sum u_{k1} u_{k2} u_{k3} / (k1 D(k1, k2 + k3))` over
/// `k1 + k2 + k3 = k`, `0 < |k_i| <= kmax`, `(k1+k2)(k2+k3)(k3+k1) != 0`.
///
/// Literal triple sum, parallel over output modes.
pub fn nonresonant_trilinear(u: &SpectralField, p: &PhysicalParams) -> Result<SpectralField> {
    let kmax = u.kmax() as i64;
    let c = u.coeffs();
    let out: Result<Vec<Complex64>> = (1..=kmax)
        .into_par_iter()
        .map(|k| {
            let mut s = ZERO;
            for k1 in -kmax..=kmax {
                if k1 == 0 {
                    continue;
                }
                for k2 in -kmax..=kmax {
                    let k3 = k - k1 - k2;
                    if k2 == 0 || k3 == 0 || k3.abs() > kmax {
                        continue;
                    }
                    if (k1 + k2) * (k2 + k3) * (k3 + k1) == 0 {
                        continue;
                    }
                    let d = pair_symbol(k1, k2 + k3, p);
                    if d == 0.0 {
                        return Err(vanishing(&[k1, k2, k3]));
                    }
                    s += at(c, k1) * at(c, k2) * at(c, k3) / (k1 as f64 * d);
                }
            }
            Ok(Complex64::new(0.0, -0.5) * s)
        })
        .collect();
    Ok(SpectralField::from_raw(out?))
}

/// Same contract as [`nonresonant_trilinear`] in `O(kmax^2)`: the denominator
/// depends only on `k1` and `m = k2 + k3`, so the inner sum is a convolution
/// minus the two excluded resonant lines `k2 = -k1` and `k3 = -k1`.
pub fn nonresonant_trilinear_fast(u: &SpectralField, p: &PhysicalParams) -> Result<SpectralField> {
    let kmax = u.kmax() as i64;
    let c = u.coeffs();
    // conv[m + 2K] = sum_{k2 + k3 = m} u_{k2} u_{k3}, |m| <= 2K
    let conv: Vec<Complex64> = (-2 * kmax..=2 * kmax)
        .map(|m| {
            let lo = (m - kmax).max(-kmax);
            let hi = (m + kmax).min(kmax);
            (lo..=hi).map(|k2| at(c, k2) * at(c, m - k2)).sum()
        })
        .collect();
    let out: Result<Vec<Complex64>> = (1..=kmax)
        .map(|k| {
            let uk = at(c, k);
            let mut s = ZERO;
            for k1 in -kmax..=kmax {
                let m = k - k1;
                if k1 == 0 || m == 0 {
                    continue;
                }
                let d = pair_symbol(k1, m, p);
                if d == 0.0 {
                    return Err(vanishing(&[k1, m, k]));
                }
                let mut inner = conv[(m + 2 * kmax) as usize] - 2.0 * at(c, -k1) * uk;
                if k1 == -k {
                    inner += uk * uk;
                }
                s += at(c, k1) * inner / (k1 as f64 * d);
            }
            Ok(Complex64::new(0.0, -0.5) * s)
        })
        .collect();
    Ok(SpectralField::from_raw(out?))
}
