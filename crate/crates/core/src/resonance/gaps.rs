use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::PhysicalParams;

/// Recorded lower bound on `min_gap / Delta^4` for `Delta <= 32`,
/// `nmax = 256` at `(alpha, beta)` in `{(1, 0), (1, 1)}`; the observed
/// minima are 5.322 and 5.319.
pub const GAP_RATIO_FLOOR: f64 = 5.0;

/// `Gamma_Delta(n) = lambda n Delta (n + Delta)` with
/// `lambda = -5 alpha (n^2 + Delta^2 + n Delta) + 3 beta`.
pub fn gamma_delta(n: i64, delta: i64, p: &PhysicalParams) -> f64 {
    let (n, d) = (n as f64, delta as f64);
    let lambda = -5.0 * p.alpha() * (n * n + d * d + n * d) + 3.0 * p.beta();
    lambda * n * d * (n + d)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub delta: i64,
    pub nmax: i64,
    pub min_gap: f64,
    pub argmin_n: i64,
    /// `min_gap / Delta^4`.
    pub ratio: f64,
}

/// Smallest `|Gamma(n + 1) - Gamma(n)|` over `0 <= n < nmax`.
pub fn gamma_gap_stats(delta: i64, nmax: i64, p: &PhysicalParams) -> Result<GapReport> {
    if delta < 1 || nmax < 2 {
        return Err(Error::InvalidParams("need Delta >= 1 and nmax >= 2".into()));
    }
    let (mut min_gap, mut argmin_n) = (f64::INFINITY, 0);
    for n in 0..nmax {
        let gap = (gamma_delta(n + 1, delta, p) - gamma_delta(n, delta, p)).abs();
        if gap < min_gap {
            min_gap = gap;
            argmin_n = n;
        }
    }
    Ok(GapReport {
        delta,
        nmax,
        min_gap,
        argmin_n,
        ratio: min_gap / (delta as f64).powi(4),
    })
}
