//! Differentiation-by-parts operators and the normal-form representation
//! check along computed trajectories.

mod multilinear;
mod operators;
mod residual;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::params::PhysicalParams;
use crate::spectral::SpectralField;

pub use multilinear::{multilinear_constants, multilinear_ratios, trial_inputs, MultilinearRatios, MultilinearReport};
pub use operators::{
    check_nonresonance, nonresonant_trilinear, nonresonant_trilinear_fast, normal_form_bilinear, pair_symbol,
    resonant_pair, resonant_self, NonresonanceCheck,
};
pub use residual::{
    duhamel_residual, duhamel_residual_with, simpson_weights, DuhamelOptions, DuhamelResidualReport,
    ForcingArgument, TERM_NAMES,
};

/// `w_k = e^{gamma t + i phase(k) t} u_k`: the solution with damping and
/// dispersion divided out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionField {
    pub t: f64,
    pub coeffs: Vec<Complex64>,
}

impl InteractionField {
    pub fn from_field(u: &SpectralField, t: f64, p: &PhysicalParams) -> Self {
        InteractionField {
            t,
            coeffs: u
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| c * Complex64::new(p.gamma() * t, p.phase(i as i64 + 1) * t).exp())
                .collect(),
        }
    }

    pub fn to_field(&self, p: &PhysicalParams) -> SpectralField {
        let t = self.t;
        SpectralField::from_raw(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * Complex64::new(-p.gamma() * t, -p.phase(i as i64 + 1) * t).exp())
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random_field;

    #[test]
    fn interaction_round_trip() {
        let p = PhysicalParams::new(1.0, 0.5, 1.0).unwrap();
        let u = random_field(12, 1.0, 1.0, 8);
        let w = InteractionField::from_field(&u, 0.37, &p);
        let back = w.to_field(&p);
        for (a, b) in u.coeffs().iter().zip(back.coeffs()) {
            assert!((a - b).norm() <= 1e-12 * a.norm());
        }
    }
}
