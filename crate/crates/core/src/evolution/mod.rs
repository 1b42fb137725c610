//! Time integration: exact linear propagators, the integrating-factor RK4
//! stepper, the Picard (Duhamel) solver and energy diagnostics.

mod picard;
mod stepper;
mod trajectory;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::spectral::SpectralField;

pub use picard::{picard_solve, picard_solve_with, PicardConfig, PicardSolution};
pub use stepper::{
    evolve, evolve_observed, evolve_recorded, step, Nonlinearity, Scheme, Stepper, StepperConfig,
};
pub use trajectory::{energy_law_residual, Checkpoint, Trajectory};

/// Dispersion symbol `alpha k^5 - beta k^3`.
pub fn phase(k: i64, p: &PhysicalParams) -> f64 {
    p.phase(k)
}

/// `e^{-gamma t - i phase(k) t}` when `damped`, else `e^{-i phase(k) t}`.
#[inline]
pub fn propagator(k: i64, t: f64, p: &PhysicalParams, damped: bool) -> Complex64 {
    let decay = if damped { (-p.gamma() * t).exp() } else { 1.0 };
    Complex64::from_polar(decay, -p.phase(k) * t)
}

/// Applies the linear flow `e^{Lt}` (optionally with damping `e^{-gamma t}`)
/// mode by mode. Negative `t` runs the flow backwards.
pub fn linear_propagate(u: &SpectralField, t: f64, p: &PhysicalParams, damped: bool) -> SpectralField {
    u.multiplied(|k| propagator(k, t, p, damped))
}

/// Earliest time after which `e^{-gamma t} |g| + (|f| / gamma)(1 - e^{-gamma t})`
/// stays below `2 |f| / gamma`.
pub fn absorbing_time(norm_g: f64, norm_f: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParams(format!("absorbing time needs gamma > 0, got {gamma}")));
    }
    if !(norm_g >= 0.0 && norm_f >= 0.0) || !norm_g.is_finite() || !norm_f.is_finite() {
        return Err(Error::InvalidParams("norms must be finite and nonnegative".into()));
    }
    if norm_f == 0.0 {
        if norm_g == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::NoAbsorbingTime(
            "zero forcing: only the pure decay bound e^{-gamma t}|g| applies".into(),
        ));
    }
    let level = norm_f / gamma;
    if norm_g <= level {
        return Ok(0.0);
    }
    Ok((((norm_g - level) / level).ln() / gamma).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random_field;

    #[test]
    fn absorbing_examples() {
        assert_eq!(absorbing_time(1.0, 2.0, 1.0).unwrap(), 0.0);
        assert!((absorbing_time(3.0, 1.0, 1.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(absorbing_time(2.0, 1.0, 0.5).unwrap(), 0.0);
        assert!(absorbing_time(1.0, 0.0, 1.0).is_err());
        assert!(absorbing_time(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn propagation_norms() {
        let p = PhysicalParams::new(1.0, 0.3, 0.5).unwrap();
        let u = random_field(10, 1.0, 1.0, 4);
        assert_eq!(linear_propagate(&u, 0.0, &p, true), u);
        for s in [0.0, 1.0, 2.5] {
            let n0 = u.sobolev_norm(s);
            let free = linear_propagate(&u, 1.7, &p, false).sobolev_norm(s);
            assert!((free - n0).abs() <= 1e-12 * n0);
            let damped = linear_propagate(&u, 2.0, &p, true).sobolev_norm(s);
            assert!((damped - n0 * (-1.0f64).exp()).abs() <= 1e-12 * n0);
        }
    }
}
