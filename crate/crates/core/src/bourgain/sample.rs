use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::PhysicalParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    /// Flat top with raised-cosine ramps.
    Tukey,
}

/// Time cutoff applied to a sample before any time-frequency functional.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub kind: WindowKind,
    pub start: f64,
    pub span: f64,
    /// Width of each cosine ramp.
    pub taper: f64,
}

impl Window {
    /// Tukey window on `[start, start + span]` with ramps of width `span / 8`.
    pub fn tukey(start: f64, span: f64) -> Self {
        Window {
            kind: WindowKind::Tukey,
            start,
            span,
            taper: span / 8.0,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let x = t - self.start;
        if !(0.0..=self.span).contains(&x) {
            return 0.0;
        }
        let edge = x.min(self.span - x);
        if edge >= self.taper {
            1.0
        } else {
            0.5 * (1.0 - (PI * edge / self.taper).cos())
        }
    }

    fn validate(&self, period: f64) -> Result<()> {
        let ok = self.start.is_finite()
            && self.span > 0.0
            && self.taper > 0.0
            && 2.0 * self.taper <= self.span * (1.0 + 1e-12)
            && self.start >= 0.0
            && self.start + self.span <= period * (1.0 + 1e-12);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "window {self:?} does not fit in a period of {period}"
            )))
        }
    }
}

/// Fourier coefficients `u_k(t_j)`, `k = 1..=kmax`, on the periodic time grid
/// `t_j = j * period / nt`. Values are stored raw; the window is applied only
/// inside [`SpaceTimeSample::windowed`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpaceTimeSample {
    kmax: usize,
    period: f64,
    nt: usize,
    window: Window,
    /// `values[k - 1][j]`
    values: Vec<Vec<Complex64>>,
}

impl SpaceTimeSample {
    pub fn new(kmax: usize, period: f64, window: Window, values: Vec<Vec<Complex64>>) -> Result<Self> {
        if kmax == 0 || values.len() != kmax {
            return Err(Error::InvalidField(format!("expected {kmax} modes, got {}", values.len())));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidParams(format!("period must be positive, got {period}")));
        }
        let nt = values[0].len();
        if nt < 2 || values.iter().any(|row| row.len() != nt) {
            return Err(Error::InvalidField("ragged or too short time rows".into()));
        }
        if values.iter().flatten().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidField("non-finite sample value".into()));
        }
        window.validate(period)?;
        Ok(SpaceTimeSample {
            kmax,
            period,
            nt,
            window,
            values,
        })
    }

    pub fn from_fn(
        kmax: usize,
        period: f64,
        nt: usize,
        window: Window,
        mut u: impl FnMut(i64, f64) -> Complex64,
    ) -> Result<Self> {
        let values = (1..=kmax as i64)
            .map(|k| (0..nt).map(|j| u(k, j as f64 * period / nt as f64)).collect())
            .collect();
        Self::new(kmax, period, window, values)
    }

    /// `amplitude * e^{i(kx - phase(k) t)}` (plus its conjugate at `-k`).
    pub fn characteristic(
        kmax: usize,
        k: i64,
        amplitude: Complex64,
        period: f64,
        nt: usize,
        window: Window,
        p: &PhysicalParams,
    ) -> Result<Self> {
        if k < 1 || k as usize > kmax {
            return Err(Error::InvalidParams(format!("mode {k} outside 1..={kmax}")));
        }
        let ph = p.phase(k);
        Self::from_fn(kmax, period, nt, window, |j, t| {
            if j == k {
                amplitude * Complex64::from_polar(1.0, -ph * t)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    pub fn dt(&self) -> f64 {
        self.period / self.nt as f64
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().flatten().for_each(|c| *c *= factor);
        out
    }

    /// Window times values. The single place the cutoff enters.
    pub(crate) fn windowed(&self) -> Vec<Vec<Complex64>> {
        let w: Vec<f64> = (0..self.nt).map(|j| self.window.value(self.time(j))).collect();
        self.values
            .iter()
            .map(|row| row.iter().zip(&w).map(|(c, wj)| c * wj).collect())
            .collect()
    }

    /// Lowest signed time frequency index on the grid.
    pub(crate) fn m_lo(&self) -> i64 {
        -((self.nt / 2) as i64)
    }

    /// Discrete spectrum in the modulation frame: `out[k - 1][m - m_lo]` is
    /// the coefficient of `e^{2 pi i m t / period}` in
    /// `e^{i phase(k) t} window(t) u_k(t)`.
    pub(crate) fn modulation_spectrum(&self, p: &PhysicalParams) -> Vec<Vec<Complex64>> {
        let fft = FftPlanner::new().plan_fft_forward(self.nt);
        let lo = self.m_lo();
        let n = self.nt as i64;
        let inv = 1.0 / self.nt as f64;
        self.windowed()
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                let ph = p.phase(i as i64 + 1);
                let mut buf: Vec<Complex64> = row
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * Complex64::from_polar(1.0, ph * self.time(j)))
                    .collect();
                fft.process(&mut buf);
                (lo..lo + n).map(|m| buf[m.rem_euclid(n) as usize] * inv).collect()
            })
            .collect()
    }

    /// Space-time L^2 norm of the windowed sample, rectangle rule in time and
    /// summed over `k` and `-k`.
    pub fn space_time_l2(&self) -> f64 {
        let s: f64 = self.windowed().iter().flatten().map(|c| c.norm_sqr()).sum();
        (2.0 * s * self.dt()).sqrt()
    }
}
