use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{ExactParams, PhysicalParams};

/// Checked `k^n` in 128-bit arithmetic.
pub fn pow_i128(k: i64, n: u32) -> Result<i128> {
    (k as i128).checked_pow(n).ok_or(Error::Overflow)
}

fn add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow)
}

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

fn sum_pow(ks: &[i64], n: u32) -> Result<i128> {
    ks.iter().try_fold(0i128, |acc, &k| add(acc, pow_i128(k, n)?))
}

/// `(a + b)^5 - a^5 - b^5 = 5ab(a + b)(a^2 + b^2 + ab)` and
/// `(a + b)^3 - a^3 - b^3 = 3ab(a + b)`, both in exact integer arithmetic.
pub fn quintic_identity_check(k1: i64, k2: i64) -> Result<bool> {
    let (a, b) = (k1 as i128, k2 as i128);
    let s = add(a, b)?;
    let lhs5 = add(pow_i128(k1 + k2, 5)?, -add(pow_i128(k1, 5)?, pow_i128(k2, 5)?)?)?;
    let q = add(add(mul(a, a)?, mul(b, b)?)?, mul(a, b)?)?;
    let rhs5 = mul(mul(mul(mul(5, a)?, b)?, s)?, q)?;
    let lhs3 = add(pow_i128(k1 + k2, 3)?, -add(pow_i128(k1, 3)?, pow_i128(k2, 3)?)?)?;
    let rhs3 = mul(mul(mul(3, a)?, b)?, s)?;
    Ok(lhs5 == rhs5 && lhs3 == rhs3)
}

/// Trilinear phase factor
/// `5 alpha (k1^2 + k2^2 + k3^2 + k1 k2 + k2 k3 + k3 k1) - 3 beta`.
pub fn theta(k1: i64, k2: i64, k3: i64, p: &PhysicalParams) -> f64 {
    5.0 * p.alpha() * sym_quadratic(k1, k2, k3) as f64 - 3.0 * p.beta()
}

fn sym_quadratic(k1: i64, k2: i64, k3: i64) -> i128 {
    let (a, b, c) = (k1 as i128, k2 as i128, k3 as i128);
    a * a + b * b + c * c + a * b + b * c + c * a
}

/// Cubic phase `-alpha (k1^5 + k2^5 + k3^5) + beta (k1^3 + k2^3 + k3^3)`.
pub fn kappa(k1: i64, k2: i64, k3: i64, p: &PhysicalParams) -> f64 {
    -(p.phase(k1) + p.phase(k2) + p.phase(k3))
}

/// [`kappa`] times the common scale of `e`, as an exact integer.
pub fn kappa_scaled(k1: i64, k2: i64, k3: i64, e: &ExactParams) -> Result<i128> {
    let ks = [k1, k2, k3];
    let quintic = mul(e.alpha_scaled, sum_pow(&ks, 5)?)?;
    let cubic = mul(e.beta_scaled, sum_pow(&ks, 3)?)?;
    add(-quintic, cubic)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleClass {
    /// `k1 + k2 = 0` and `k3 + k1 = 0`: `(-k, k, k)`.
    S1,
    /// `k1 + k2 = 0` only: `(j, -j, k)`.
    S2,
    /// `k3 + k1 = 0` only: `(j, k, -j)`.
    S3,
    Nonresonant,
    /// A zero frequency or `k2 + k3 = 0`; such triples never enter the
    /// trilinear sums.
    Degenerate,
}

/// Sorts a frequency triple by which pairwise sums vanish.
pub fn classify_resonant_triple(k1: i64, k2: i64, k3: i64) -> TripleClass {
    if k1 == 0 || k2 == 0 || k3 == 0 || k2 + k3 == 0 {
        return TripleClass::Degenerate;
    }
    match (k1 + k2 == 0, k3 + k1 == 0) {
        (true, true) => TripleClass::S1,
        (true, false) => TripleClass::S2,
        (false, true) => TripleClass::S3,
        (false, false) => TripleClass::Nonresonant,
    }
}

/// Integer coefficients `(c0, c_alpha, c_beta)` of both sides of
/// `sum_i (m_i + alpha k_i^5 - beta k_i^3) = -(k1+k2)(k2+k3)(k3+k1) theta(k1,k2,k3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FourPhaseSides {
    pub lhs: [i128; 3],
    pub rhs: [i128; 3],
}

pub fn four_phase_sides(k: [i64; 4], m: [i64; 4]) -> Result<FourPhaseSides> {
    if k.iter().map(|&x| x as i128).sum::<i128>() != 0 || m.iter().map(|&x| x as i128).sum::<i128>() != 0 {
        return Err(Error::Precondition("frequencies and modulations must each sum to zero".into()));
    }
    let m_sum = m.iter().try_fold(0i128, |acc, &x| add(acc, x as i128))?;
    let lhs = [m_sum, sum_pow(&k, 5)?, -sum_pow(&k, 3)?];
    let (a, b, c) = (k[0] as i128, k[1] as i128, k[2] as i128);
    let pairs = mul(mul(add(a, b)?, add(b, c)?)?, add(c, a)?)?;
    let rhs = [0, mul(mul(-5, pairs)?, sym_quadratic(k[0], k[1], k[2]))?, mul(3, pairs)?];
    Ok(FourPhaseSides { lhs, rhs })
}

/// Exact check of the four-phase factorization. The coefficients of `1`,
/// `alpha` and `beta` must agree; for rational parameters both sides are
/// additionally evaluated in scaled integers.
pub fn four_phase_factorization_check(k: [i64; 4], m: [i64; 4], p: &PhysicalParams) -> Result<bool> {
    let sides = four_phase_sides(k, m)?;
    let mut ok = sides.lhs == sides.rhs;
    if let Ok(e) = ExactParams::from_params(p) {
        let eval = |c: [i128; 3]| -> Result<i128> {
            add(add(mul(c[0], e.scale)?, mul(c[1], e.alpha_scaled)?)?, mul(c[2], e.beta_scaled)?)
        };
        ok &= eval(sides.lhs)? == eval(sides.rhs)?;
    }
    Ok(ok)
}
