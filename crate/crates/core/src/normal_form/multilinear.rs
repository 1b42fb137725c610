use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::operators::{normal_form_bilinear, resonant_pair, resonant_self};
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::spectral::{random_field, SpectralField};
use crate::stats::RatioStats;

/// Ratios for one set of inputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MultilinearRatios {
    /// `|B(phi, psi)|_{H^s} / (|phi| |psi|)`
    pub bilinear: f64,
    /// `|rho(u)|_{H^s} / |u|^3`
    pub resonant_self: f64,
    /// `|sigma(u)|_{H^s} / |u|^3`
    pub resonant_pair: f64,
}

pub fn multilinear_ratios(
    phi: &SpectralField,
    psi: &SpectralField,
    u: &SpectralField,
    s: f64,
    p: &PhysicalParams,
) -> Result<MultilinearRatios> {
    let (np, nq, nu) = (phi.l2_norm(), psi.l2_norm(), u.l2_norm());
    if np == 0.0 || nq == 0.0 || nu == 0.0 {
        return Err(Error::ZeroDenominator("multilinear inputs must be nonzero".into()));
    }
    Ok(MultilinearRatios {
        bilinear: normal_form_bilinear(phi, psi, p)?.sobolev_norm(s) / (np * nq),
        resonant_self: resonant_self(u, p)?.sobolev_norm(s) / nu.powi(3),
        resonant_pair: resonant_pair(u, p)?.sobolev_norm(s) / nu.powi(3),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MultilinearReport {
    pub trials: usize,
    pub kmax: usize,
    pub s: f64,
    pub seed: u64,
    pub bilinear: RatioStats,
    pub resonant_self: RatioStats,
    pub resonant_pair: RatioStats,
    pub samples: Vec<MultilinearRatios>,
}

/// Random inputs for trial `i`: independent phase streams with a decay
/// exponent drawn from `[0, 2]`, so both rough and smooth profiles appear.
pub fn trial_inputs(kmax: usize, seed: u64, trial: usize) -> [SpectralField; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let mut draw = || random_field(kmax, rng.gen_range(0.0..2.0), 1.0, rng.gen());
    [draw(), draw(), draw()]
}

/// Empirical sizes of the normal-form operators over `trials` random inputs.
pub fn multilinear_constants(
    trials: usize,
    kmax: usize,
    s: f64,
    seed: u64,
    p: &PhysicalParams,
) -> Result<MultilinearReport> {
    if trials == 0 || kmax == 0 {
        return Err(Error::InvalidParams("trials and kmax must be positive".into()));
    }
    let samples: Result<Vec<MultilinearRatios>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let [phi, psi, u] = trial_inputs(kmax, seed, i);
            multilinear_ratios(&phi, &psi, &u, s, p)
        })
        .collect();
    let samples = samples?;
    let stats = |pick: fn(&MultilinearRatios) -> f64| {
        RatioStats::from_samples(&samples.iter().map(pick).collect::<Vec<_>>()).expect("trials > 0")
    };
    Ok(MultilinearReport {
        trials,
        kmax,
        s,
        seed,
        bilinear: stats(|r| r.bilinear),
        resonant_self: stats(|r| r.resonant_self),
        resonant_pair: stats(|r| r.resonant_pair),
        samples,
    })
}
