use std::f64::consts::PI;

use num_complex::Complex64;

use super::sample::SpaceTimeSample;
use crate::params::PhysicalParams;

/// `<x> = 1 + |x|`.
#[inline]
pub fn bracket(x: f64) -> f64 {
    1.0 + x.abs()
}

/// Space-time spectrum stored as lines `(sigma, c)` per positive mode, where
/// `sigma` is the distance `tau + phase(k)` from the characteristic and `c`
/// the time-average amplitude over one period. Negative modes are the
/// conjugate mirror and contribute equally to every norm.
#[derive(Clone, Debug, PartialEq)]
pub struct LineSpectrum {
    pub period: f64,
    /// `modes[k - 1]`
    pub modes: Vec<Vec<(f64, Complex64)>>,
}

impl LineSpectrum {
    pub fn from_sample(u: &SpaceTimeSample, p: &PhysicalParams) -> Self {
        let unit = 2.0 * PI / u.period();
        let lo = u.m_lo();
        let modes = u
            .modulation_spectrum(p)
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .enumerate()
                    .map(|(i, c)| (unit * (lo + i as i64) as f64, c))
                    .collect()
            })
            .collect();
        LineSpectrum {
            period: u.period(),
            modes,
        }
    }

    /// `(sum_k <k>^{2s} T sum_sigma <sigma>^{2b} |c|^2)^{1/2}` over `k` and `-k`,
    /// `T` the period.
    pub fn xsb(&self, s: f64, b: f64) -> f64 {
        let total: f64 = self
            .modes
            .iter()
            .enumerate()
            .map(|(i, lines)| {
                let wk = bracket((i + 1) as f64).powf(2.0 * s);
                let inner: f64 = lines.iter().map(|(sig, c)| bracket(*sig).powf(2.0 * b) * c.norm_sqr()).sum();
                wk * inner
            })
            .sum();
        (2.0 * self.period * total).sqrt()
    }

    /// `(sum_k <k>^{2s} (sum_sigma |c| <sigma>^{-mod_power})^2)^{1/2}` over `k`
    /// and `-k`.
    pub fn l2_l1(&self, s: f64, mod_power: f64) -> f64 {
        let total: f64 = self
            .modes
            .iter()
            .enumerate()
            .map(|(i, lines)| {
                let wk = bracket((i + 1) as f64).powf(2.0 * s);
                let inner: f64 = lines.iter().map(|(sig, c)| c.norm() * bracket(*sig).powf(-mod_power)).sum();
                wk * inner * inner
            })
            .sum();
        (2.0 * total).sqrt()
    }

    pub fn ys(&self, s: f64) -> f64 {
        self.xsb(s, 0.5) + self.l2_l1(s, 0.0)
    }

    pub fn zs(&self, s: f64) -> f64 {
        self.xsb(s, -0.5) + self.l2_l1(s, 1.0)
    }
}

/// `||<k>^s <tau + phase(k)>^b u^(k, tau)||` in `l^2_k L^2_tau` of the windowed
/// sample, `tau` on the grid `2 pi m / period`.
pub fn xsb_norm(u: &SpaceTimeSample, s: f64, b: f64, p: &PhysicalParams) -> f64 {
    LineSpectrum::from_sample(u, p).xsb(s, b)
}

/// `X^{s,1/2}` norm plus `||<k>^s u^||` in `l^2_k L^1_tau`.
pub fn ys_norm(u: &SpaceTimeSample, s: f64, p: &PhysicalParams) -> f64 {
    LineSpectrum::from_sample(u, p).ys(s)
}

/// `X^{s,-1/2}` norm plus `||<k>^s u^ / <tau + phase(k)>||` in `l^2_k L^1_tau`.
pub fn zs_norm(u: &SpaceTimeSample, s: f64, p: &PhysicalParams) -> f64 {
    LineSpectrum::from_sample(u, p).zs(s)
}
