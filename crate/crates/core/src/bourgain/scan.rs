use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::norms::{xsb_norm, LineSpectrum};
use super::ratios::{bilinear_ratio, l4_ratio, l6_ratio, DENOMINATOR_B};
use super::sample::{SpaceTimeSample, Window};
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::spectral::random_field;
use crate::stats::{least_squares_slope, RatioStats};

/// Time grid and random-sample shape shared by the scans.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleGrid {
    pub period: f64,
    pub nt: usize,
    /// Window length; the window starts at `t = 0`.
    pub span: f64,
    /// Highest modulation harmonic in a random sample.
    pub mmax: usize,
}

impl Default for SampleGrid {
    fn default() -> Self {
        SampleGrid {
            period: 1.0,
            nt: 64,
            span: 1.0,
            mmax: 8,
        }
    }
}

/// Random sample `u_k(t) = e^{-i phase(k) t} sum_{|m| <= mmax} a_{k,m} e^{2 pi i m t / T}`
/// with `|a_{k,m}| ~ U(0,1) k^{-dk} <m>^{-dm}`. The decays are drawn from
/// `[0, 2]` per trial; every trial has its own ChaCha stream.
pub fn random_sample(kmax: usize, grid: &SampleGrid, seed: u64, trial: usize, p: &PhysicalParams) -> Result<SpaceTimeSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let dk: f64 = rng.gen_range(0.0..2.0);
    let dm: f64 = rng.gen_range(0.0..2.0);
    let mmax = grid.mmax as i64;
    let amps: Vec<Vec<Complex64>> = (1..=kmax)
        .map(|k| {
            (-mmax..=mmax)
                .map(|m| {
                    let r = rng.gen::<f64>() * (k as f64).powf(-dk) * (1.0 + m.abs() as f64).powf(-dm);
                    Complex64::from_polar(r, rng.gen::<f64>() * 2.0 * PI)
                })
                .collect()
        })
        .collect();
    let unit = 2.0 * PI / grid.period;
    SpaceTimeSample::from_fn(kmax, grid.period, grid.nt, Window::tukey(0.0, grid.span), |k, t| {
        let v: Complex64 = amps[k as usize - 1]
            .iter()
            .zip(-mmax..=mmax)
            .map(|(a, m)| a * Complex64::from_polar(1.0, unit * m as f64 * t))
            .sum();
        v * Complex64::from_polar(1.0, -p.phase(k) * t)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    Bilinear,
    L4,
    L6,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub trial: usize,
    pub seed: u64,
    pub kmax: usize,
    pub s: f64,
    pub b: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub kind: ScanKind,
    pub rows: Vec<ScanRow>,
    pub stats: RatioStats,
    /// `L^6` only: largest ratio per `kmax` and the log-log slope through them.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub max_by_kmax: Vec<(usize, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loglog_slope: Option<f64>,
}

impl ScanReport {
    fn new(kind: ScanKind, rows: Vec<ScanRow>) -> Result<Self> {
        let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
        let stats = RatioStats::from_samples(&ratios).ok_or_else(|| Error::InvalidParams("scan needs at least one trial".into()))?;
        Ok(ScanReport {
            kind,
            rows,
            stats,
            max_by_kmax: Vec::new(),
            loglog_slope: None,
        })
    }

    /// CSV `trial,seed,kmax,s,b,ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,seed,kmax,s,b,ratio\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{},{},{:.16e}", r.trial, r.seed, r.kmax, r.s, r.b, r.ratio).unwrap();
        }
        out
    }
}

/// Bilinear ratio over `trials` independent pairs of random samples.
pub fn bilinear_scan(trials: usize, kmax: usize, s: f64, grid: &SampleGrid, seed: u64, p: &PhysicalParams) -> Result<ScanReport> {
    let rows = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let u1 = random_sample(kmax, grid, seed, 2 * trial, p)?;
            let u2 = random_sample(kmax, grid, seed, 2 * trial + 1, p)?;
            Ok(ScanRow {
                trial,
                seed,
                kmax,
                s,
                b: DENOMINATOR_B,
                ratio: bilinear_ratio(&u1, &u2, s, p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ScanReport::new(ScanKind::Bilinear, rows)
}

/// `L^4` ratio with cutoff `delta` over random samples.
pub fn l4_scan(trials: usize, kmax: usize, delta: f64, grid: &SampleGrid, seed: u64, p: &PhysicalParams) -> Result<ScanReport> {
    let rows = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let u = random_sample(kmax, grid, seed, trial, p)?;
            Ok(ScanRow {
                trial,
                seed,
                kmax,
                s: 0.0,
                b: DENOMINATOR_B,
                ratio: l4_ratio(&u, delta, p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ScanReport::new(ScanKind::L4, rows)
}

/// `L^6` ratio for flat random data (`|h_k|` constant, random phases) at each
/// `kmax`, plus the log-log slope of the per-`kmax` maxima.
pub fn l6_scan(trials: usize, kmaxes: &[usize], eps: f64, span: f64, seed: u64, p: &PhysicalParams) -> Result<ScanReport> {
    if kmaxes.len() < 2 {
        return Err(Error::InvalidParams("an L6 scan needs at least two kmax values".into()));
    }
    let mut rows = Vec::new();
    let mut max_by_kmax = Vec::new();
    for &kmax in kmaxes {
        let batch = (0..trials)
            .map(|trial| {
                let trial_seed = seed.wrapping_add(trial as u64);
                let h = random_field(kmax, 0.0, 1.0, trial_seed);
                Ok(ScanRow {
                    trial,
                    seed: trial_seed,
                    kmax,
                    s: eps,
                    b: 0.0,
                    ratio: l6_ratio(&h, eps, span, p)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        max_by_kmax.push((kmax, batch.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max)));
        rows.extend(batch);
    }
    let xs: Vec<f64> = max_by_kmax.iter().map(|(k, _)| (*k as f64).ln()).collect();
    let ys: Vec<f64> = max_by_kmax.iter().map(|(_, m)| m.ln()).collect();
    let mut report = ScanReport::new(ScanKind::L6, rows)?;
    report.loglog_slope = Some(least_squares_slope(&xs, &ys));
    report.max_by_kmax = max_by_kmax;
    Ok(report)
}

/// Log-log slope of `X^{s,b} / X^{s,b'}` against the window length for one
/// fixed random sample shape, `b < b'`. Short windows spread the modulation
/// spectrum, so the ratio should decay like `span^{b' - b}`.
#[derive(Clone, Debug, Serialize)]
pub struct ModulationTrend {
    pub spans: Vec<f64>,
    pub ratios: Vec<f64>,
    pub slope: f64,
}

pub fn modulation_trend(
    kmax: usize,
    s: f64,
    b: f64,
    b_prime: f64,
    spans: &[f64],
    nt: usize,
    seed: u64,
    p: &PhysicalParams,
) -> Result<ModulationTrend> {
    let ratios = spans
        .iter()
        .map(|&span| {
            let u = short_sample(kmax, span, nt, seed, p)?;
            Ok(xsb_norm(&u, s, b, p) / xsb_norm(&u, s, b_prime, p))
        })
        .collect::<Result<Vec<f64>>>()?;
    let xs: Vec<f64> = spans.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = ratios.iter().map(|v| v.ln()).collect();
    Ok(ModulationTrend {
        spans: spans.to_vec(),
        slope: least_squares_slope(&xs, &ys),
        ratios,
    })
}

/// Sample of unit period whose profile varies on the window scale:
/// `u_k(t) = e^{-i phase(k) t} c_k (1 + cos(2 pi t / span + theta_k))` on a
/// window `[0, span]`.
fn short_sample(kmax: usize, span: f64, nt: usize, seed: u64, p: &PhysicalParams) -> Result<SpaceTimeSample> {
    let c = random_field(kmax, 1.0, 1.0, seed);
    let theta = random_field(kmax, 0.0, 1.0, seed ^ 0x5eed);
    SpaceTimeSample::from_fn(kmax, 1.0, nt, Window::tukey(0.0, span), |k, t| {
        let th = theta.coeff(k).arg();
        c.coeff(k) * (1.0 + (2.0 * PI * t / span + th).cos()) * Complex64::from_polar(1.0, -p.phase(k) * t)
    })
}

/// Largest `Z^s / (span^{0.9} Y^s)` over random samples and window lengths.
#[derive(Clone, Debug, Serialize)]
pub struct ZyConstant {
    pub constant: f64,
    pub worst_span: f64,
    pub worst_trial: usize,
}

pub fn zy_constant(
    trials: usize,
    kmax: usize,
    s: f64,
    spans: &[f64],
    nt: usize,
    seed: u64,
    p: &PhysicalParams,
) -> Result<ZyConstant> {
    let results = spans
        .iter()
        .flat_map(|&span| (0..trials).map(move |trial| (span, trial)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(span, trial)| {
            let grid = SampleGrid {
                period: 1.0,
                nt,
                span,
                mmax: 4,
            };
            let u = random_sample(kmax, &grid, seed, trial, p)?;
            let lines = LineSpectrum::from_sample(&u, p);
            Ok((lines.zs(s) / (span.powf(0.9) * lines.ys(s)), span, trial))
        })
        .collect::<Result<Vec<_>>>()?;
    let (constant, worst_span, worst_trial) = results
        .into_iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or_else(|| Error::InvalidParams("need at least one trial and span".into()))?;
    Ok(ZyConstant {
        constant,
        worst_span,
        worst_trial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_seeded() {
        let p = PhysicalParams::new(1.0, 0.0, 1.0).unwrap();
        let g = SampleGrid::default();
        let a = random_sample(4, &g, 9, 3, &p).unwrap();
        let b = random_sample(4, &g, 9, 3, &p).unwrap();
        let c = random_sample(4, &g, 9, 4, &p).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
