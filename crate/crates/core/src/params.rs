//! Physical constants of the damped, forced Kawahara equation
//!
//! ```text
//! u_t + alpha u_xxxxx + beta u_xxx + gamma u + (u^2)_x / 2 = f
//! ```
//!
//! together with the exact rational view of `(alpha, beta)` used by the
//! integer arithmetic in [`crate::resonance`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Search bound used when a [`PhysicalParams`] value records its
/// nonresonance status.
pub const RESONANCE_SEARCH_BOUND: i64 = 1 << 16;

/// Largest denominator accepted when reading a float as an exact rational.
pub const MAX_RATIONAL_DENOMINATOR: i128 = 1_000_000;

/// Dispersion, third-order and damping coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub struct PhysicalParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    nonresonant: bool,
}

#[derive(Serialize, Deserialize)]
struct ParamsRepr {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl TryFrom<ParamsRepr> for PhysicalParams {
    type Error = Error;

    fn try_from(r: ParamsRepr) -> Result<Self> {
        PhysicalParams::new(r.alpha, r.beta, r.gamma)
    }
}

impl From<PhysicalParams> for ParamsRepr {
    fn from(p: PhysicalParams) -> Self {
        ParamsRepr {
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
        }
    }
}

impl PhysicalParams {
    /// Validates `alpha != 0`, finiteness and `gamma >= 0`. Resonant pairs are
    /// accepted here; the flag is available through [`Self::is_nonresonant`].
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::InvalidParams("alpha, beta, gamma must be finite".into()));
        }
        if alpha == 0.0 {
            return Err(Error::InvalidParams("alpha must be nonzero".into()));
        }
        if gamma < 0.0 {
            return Err(Error::InvalidParams("gamma must be nonnegative".into()));
        }
        let nonresonant = nonresonance_witness(alpha, beta, RESONANCE_SEARCH_BOUND).is_none();
        Ok(PhysicalParams {
            alpha,
            beta,
            gamma,
            nonresonant,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_nonresonant(&self) -> bool {
        self.nonresonant
    }

    /// Same dispersion, different damping.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        PhysicalParams::new(self.alpha, self.beta, gamma)
    }

    /// Fails with the witness pair when the parameters are resonant.
    pub fn require_nonresonant(&self) -> Result<()> {
        match nonresonance_witness(self.alpha, self.beta, RESONANCE_SEARCH_BOUND) {
            None => Ok(()),
            Some(witness) => Err(Error::Resonant { witness }),
        }
    }

    /// Dispersion symbol `alpha k^5 - beta k^3`.
    #[inline]
    pub fn phase(&self, k: i64) -> f64 {
        let kf = k as f64;
        let k3 = kf * kf * kf;
        self.alpha * k3 * kf * kf - self.beta * k3
    }
}

/// Looks for nonzero `(k1, k2)` with `|k1|, |k2| <= kbound` and
/// `5 alpha (k1^2 + k2^2 + k1 k2) = 3 beta`.
///
/// The quadratic form is at least `3/4 max(k1^2, k2^2)`, so only a finite box
/// needs scanning whatever the bound.
pub(crate) fn nonresonance_witness(alpha: f64, beta: f64, kbound: i64) -> Option<(i64, i64)> {
    let target = 3.0 * beta / (5.0 * alpha);
    if !(target >= 1.0) {
        return None;
    }
    let reach = ((4.0 * target / 3.0).sqrt().ceil() as i64 + 1).min(kbound);
    let exact = ExactParams::from_values(alpha, beta).ok();
    for k1 in 1..=reach {
        for k2 in -reach..=reach {
            if k2 == 0 {
                continue;
            }
            let q = k1 * k1 + k2 * k2 + k1 * k2;
            let hit = match &exact {
                // 5 a q == 3 b in the common scale
                Some(e) => 5 * e.alpha_scaled * q as i128 == 3 * e.beta_scaled,
                None => {
                    let lhs = 5.0 * alpha * q as f64;
                    (lhs - 3.0 * beta).abs() <= 1e-12 * lhs.abs().max((3.0 * beta).abs())
                }
            };
            if hit {
                return Some((k1, k2));
            }
        }
    }
    None
}

/// `(alpha, beta)` scaled by a common positive integer so both become
/// integers: `alpha = alpha_scaled / scale`, `beta = beta_scaled / scale`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactParams {
    pub alpha_scaled: i128,
    pub beta_scaled: i128,
    pub scale: i128,
}

impl ExactParams {
    pub fn from_params(p: &PhysicalParams) -> Result<Self> {
        Self::from_values(p.alpha, p.beta)
    }

    /// Each float is read as the simplest rational (denominator at most
    /// [`MAX_RATIONAL_DENOMINATOR`]) that rounds to it; floats without such a
    /// reading are rejected.
    pub fn from_values(alpha: f64, beta: f64) -> Result<Self> {
        let (an, ad) = exact_rational(alpha, MAX_RATIONAL_DENOMINATOR).ok_or(Error::NoExactKey {
            name: "alpha",
            value: alpha,
        })?;
        let (bn, bd) = exact_rational(beta, MAX_RATIONAL_DENOMINATOR).ok_or(Error::NoExactKey {
            name: "beta",
            value: beta,
        })?;
        let scale = lcm(ad, bd);
        Ok(ExactParams {
            alpha_scaled: an.checked_mul(scale / ad).ok_or(Error::Overflow)?,
            beta_scaled: bn.checked_mul(scale / bd).ok_or(Error::Overflow)?,
            scale,
        })
    }

    pub fn is_integral(&self) -> bool {
        self.scale == 1
    }
}

/// Simplest `p / q` with `0 < q <= max_den` whose nearest double is `x`.
pub fn exact_rational(x: f64, max_den: i128) -> Option<(i128, i128)> {
    if !x.is_finite() {
        return None;
    }
    if x == x.trunc() && x.abs() < 9.0e15 {
        return Some((x as i128, 1));
    }
    let (mut h1, mut h2): (i128, i128) = (1, 0);
    let (mut k1, mut k2): (i128, i128) = (0, 1);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 9.0e15 {
            return None;
        }
        let ai = a as i128;
        let h = ai.checked_mul(h1)?.checked_add(h2)?;
        let k = ai.checked_mul(k1)?.checked_add(k2)?;
        if k > max_den {
            return None;
        }
        if h as f64 / k as f64 == x {
            return Some((h, k));
        }
        let frac = y - a;
        if frac == 0.0 {
            return None;
        }
        y = 1.0 / frac;
        h2 = h1;
        h1 = h;
        k2 = k1;
        k1 = k;
    }
    None
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm(a: i128, b: i128) -> i128 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_alpha_and_negative_gamma() {
        assert!(PhysicalParams::new(0.0, 1.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, -0.1).is_err());
        assert!(PhysicalParams::new(f64::NAN, 1.0, 0.1).is_err());
    }

    #[test]
    fn phase_values() {
        let p = PhysicalParams::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(p.phase(2), 32.0);
        let p = PhysicalParams::new(1.0, 1.0, 0.0).unwrap();
        assert_eq!(p.phase(1), 0.0);
        let p = PhysicalParams::new(2.0, 3.0, 0.0).unwrap();
        assert_eq!(p.phase(-1), 1.0);
    }

    #[test]
    fn rational_reading() {
        assert_eq!(exact_rational(0.1, MAX_RATIONAL_DENOMINATOR), Some((1, 10)));
        assert_eq!(exact_rational(-2.5, MAX_RATIONAL_DENOMINATOR), Some((-5, 2)));
        assert_eq!(exact_rational(1.0 / 3.0, MAX_RATIONAL_DENOMINATOR), Some((1, 3)));
        assert_eq!(exact_rational(std::f64::consts::PI, MAX_RATIONAL_DENOMINATOR), None);
        let e = ExactParams::from_values(0.5, 1.0 / 3.0).unwrap();
        assert_eq!(e, ExactParams { alpha_scaled: 3, beta_scaled: 2, scale: 6 });
    }

    #[test]
    fn resonance_flag() {
        assert!(PhysicalParams::new(1.0, 0.0, 1.0).unwrap().is_nonresonant());
        assert!(!PhysicalParams::new(3.0, 5.0, 1.0).unwrap().is_nonresonant());
        assert!(PhysicalParams::new(1.0, -7.0, 1.0).unwrap().is_nonresonant());
        // 3 beta / 5 alpha = 7 = 1 + 4 + 2
        assert!(!PhysicalParams::new(3.0, 35.0, 1.0).unwrap().is_nonresonant());
        // 3 beta / 5 alpha = 2 is not represented by the form
        assert!(PhysicalParams::new(3.0, 10.0, 1.0).unwrap().is_nonresonant());
    }
}
