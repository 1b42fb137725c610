//! Truncated real, mean-zero fields on the torus `R / 2 pi Z`.
//!
//! Coefficients follow `c_k = (1 / 2 pi) int e^{-ikx} u(x) dx`. Only
//! `k = 1..=kmax` is stored; `c_0 = 0` and `c_{-k} = conj(c_k)` are implied.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-mode tolerance for Hermitian symmetry (and a vanishing mean) when a
/// full two-sided spectrum is imported.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Fourier coefficients `c_1..=c_kmax` of a real mean-zero field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumJson", into = "SpectrumJson")]
pub struct SpectralField {
    kmax: usize,
    coeffs: Vec<Complex64>,
}

/// Wire format: `{"kmax": K, "coeffs": [[re, im], ...]}` for `k = 1..=K`.
#[derive(Serialize, Deserialize)]
struct SpectrumJson {
    kmax: usize,
    coeffs: Vec<[f64; 2]>,
}

impl TryFrom<SpectrumJson> for SpectralField {
    type Error = Error;

    fn try_from(j: SpectrumJson) -> Result<Self> {
        let coeffs = j.coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        SpectralField::new(j.kmax, coeffs)
    }
}

impl From<SpectralField> for SpectrumJson {
    fn from(u: SpectralField) -> Self {
        SpectrumJson {
            kmax: u.kmax,
            coeffs: u.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl SpectralField {
    pub fn new(kmax: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if kmax == 0 {
            return Err(Error::InvalidField("kmax must be positive".into()));
        }
        if coeffs.len() != kmax {
            return Err(Error::InvalidField(format!(
                "expected {kmax} coefficients, got {}",
                coeffs.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidField(format!("coefficient k = {} is not finite", i + 1)));
        }
        Ok(SpectralField { kmax, coeffs })
    }

    pub fn zeros(kmax: usize) -> Self {
        assert!(kmax > 0, "kmax must be positive");
        SpectralField {
            kmax,
            coeffs: vec![ZERO; kmax],
        }
    }

    /// Builds a field from `c(k)` for `k = 1..=kmax`.
    pub fn from_fn(kmax: usize, c: impl FnMut(i64) -> Complex64) -> Result<Self> {
        Self::new(kmax, (1..=kmax as i64).map(c).collect())
    }

    /// Unchecked constructor for internal kernels whose outputs are
    /// finite by construction or validated by the caller.
    pub(crate) fn from_raw(coeffs: Vec<Complex64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        SpectralField {
            kmax: coeffs.len(),
            coeffs,
        }
    }

    /// Imports `c_{-K}..=c_K` (length `2K + 1`). Asymmetry or a nonzero mean
    /// beyond [`HERMITIAN_TOLERANCE`] is an error.
    pub fn from_full_spectrum(kmax: usize, full: &[Complex64]) -> Result<Self> {
        if full.len() != 2 * kmax + 1 {
            return Err(Error::InvalidField(format!(
                "full spectrum for kmax = {kmax} needs {} entries, got {}",
                2 * kmax + 1,
                full.len()
            )));
        }
        let at = |k: i64| full[(k + kmax as i64) as usize];
        if at(0).norm() > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidField(format!("mean mode is {} (not zero)", at(0))));
        }
        for k in 1..=kmax as i64 {
            let gap = (at(-k) - at(k).conj()).norm();
            if !(gap <= HERMITIAN_TOLERANCE) {
                return Err(Error::InvalidField(format!(
                    "reality violated at k = {k}: |c_-k - conj(c_k)| = {gap:e}"
                )));
            }
        }
        Self::new(kmax, (1..=kmax as i64).map(at).collect())
    }

    /// `c_{-K}..=c_K`.
    pub fn to_full_spectrum(&self) -> Vec<Complex64> {
        let k = self.kmax as i64;
        (-k..=k).map(|j| self.coeff(j)).collect()
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    /// Stored `c_1..=c_kmax`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// `c_k` for any integer `k`; zero outside the retained band.
    #[inline]
    pub fn coeff(&self, k: i64) -> Complex64 {
        let a = k.unsigned_abs() as usize;
        if a == 0 || a > self.kmax {
            ZERO
        } else if k > 0 {
            self.coeffs[a - 1]
        } else {
            self.coeffs[a - 1].conj()
        }
    }

    /// Truncates or zero-pads to a new `kmax`.
    pub fn resized(&self, kmax: usize) -> Self {
        let mut coeffs = vec![ZERO; kmax];
        let n = kmax.min(self.kmax);
        coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        SpectralField::from_raw(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// `sqrt(sum_{k != 0} |k|^{2s} |c_k|^2)`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let sum: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| ((i + 1) as f64).powf(2.0 * s) * c.norm_sqr())
            .sum();
        (2.0 * sum).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    /// `(1 / 2 pi) int f u dx = sum_{k != 0} f_k conj(u_k)`. Fields may have
    /// different `kmax`.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        2.0 * s
    }

    /// # Panics
    /// If the two fields have different `kmax`.
    pub fn add(&self, other: &SpectralField) -> SpectralField {
        self.zip_with(other, |a, b| a + b)
    }

    /// # Panics
    /// If the two fields have different `kmax`.
    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scaled(&self, factor: f64) -> SpectralField {
        SpectralField::from_raw(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Applies a per-mode complex multiplier `m(k)`, `k >= 1`. The multiplier
    /// must satisfy `m(-k) = conj(m(k))` for the result to stay real, which
    /// holds for every Fourier multiplier of a real operator.
    pub fn multiplied(&self, mut m: impl FnMut(i64) -> Complex64) -> SpectralField {
        SpectralField::from_raw(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * m(i as i64 + 1))
                .collect(),
        )
    }

    fn zip_with(&self, other: &SpectralField, f: impl Fn(Complex64, Complex64) -> Complex64) -> SpectralField {
        assert_eq!(self.kmax, other.kmax, "kmax mismatch");
        SpectralField::from_raw(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("spectrum serialization is infallible")
    }
}

/// `c_k = scale * k^{-decay} * e^{i theta_k}` with phases drawn from a
/// ChaCha8 stream seeded by `seed`.
pub fn random_field(kmax: usize, decay: f64, scale: f64, seed: u64) -> SpectralField {
    assert!(kmax > 0, "kmax must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (1..=kmax)
        .map(|k| {
            let theta = rng.gen::<f64>() * 2.0 * PI;
            Complex64::from_polar(scale * (k as f64).powf(-decay), theta)
        })
        .collect();
    SpectralField::from_raw(coeffs)
}

/// Smallest grid that keeps quadratic products of `kmax`-banded fields
/// alias-free with room to spare.
pub fn min_grid(kmax: usize) -> usize {
    4 * kmax + 2
}

/// Power-of-two grid used by the fast kernels.
pub fn default_grid(kmax: usize) -> usize {
    min_grid(kmax).next_power_of_two()
}

fn check_grid(nx: usize, kmax: usize) -> Result<()> {
    let required = min_grid(kmax);
    if nx < required {
        return Err(Error::GridTooSmall { nx, kmax, required });
    }
    Ok(())
}

/// Samples `u(2 pi j / nx)`, `j = 0..nx`.
pub fn to_physical(u: &SpectralField, nx: usize) -> Result<Vec<f64>> {
    check_grid(nx, u.kmax)?;
    let fft = FftPlanner::new().plan_fft_inverse(nx);
    let mut buf = spread(u.coeffs(), nx);
    fft.process(&mut buf);
    Ok(buf.iter().map(|z| z.re).collect())
}

/// Inverse of [`to_physical`]: discrete coefficients `k = 1..=kmax` of
/// equispaced samples. The sample mean is discarded.
pub fn to_spectral(samples: &[f64], kmax: usize) -> Result<SpectralField> {
    if kmax == 0 {
        return Err(Error::InvalidField("kmax must be positive".into()));
    }
    let nx = samples.len();
    check_grid(nx, kmax)?;
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidField("non-finite sample".into()));
    }
    let fft = FftPlanner::new().plan_fft_forward(nx);
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.process(&mut buf);
    let inv = 1.0 / nx as f64;
    Ok(SpectralField::from_raw(buf[1..=kmax].iter().map(|c| c * inv).collect()))
}

/// Places `c_1..c_K` and their conjugates on an `nx`-point FFT buffer.
fn spread(coeffs: &[Complex64], nx: usize) -> Vec<Complex64> {
    let mut buf = vec![ZERO; nx];
    for (i, c) in coeffs.iter().enumerate() {
        buf[i + 1] = *c;
        buf[nx - i - 1] = c.conj();
    }
    buf
}

/// CSV with columns `x, u` on an `nx`-point grid.
pub fn physical_csv(u: &SpectralField, nx: usize) -> Result<String> {
    let samples = to_physical(u, nx)?;
    let mut out = String::from("x,u\n");
    for (j, v) in samples.iter().enumerate() {
        let x = 2.0 * PI * j as f64 / nx as f64;
        writeln!(out, "{x:.16e},{v:.16e}").unwrap();
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvolutionMode {
    /// Pseudospectral product on a padded grid.
    #[default]
    Fast,
    /// Literal sum over `k1 + k2 = k`.
    Direct,
}

/// `N(u)_k = -(ik/2) sum_{k1 + k2 = k} u_{k1} u_{k2}`, the Fourier form of
/// `-(u^2)_x / 2`, truncated to `kmax`.
pub fn nonlinear_term(u: &SpectralField, mode: ConvolutionMode) -> SpectralField {
    let out = match mode {
        ConvolutionMode::Fast => NonlinearKernel::new(u.kmax).apply(u.coeffs()),
        ConvolutionMode::Direct => nonlinear_direct(u.coeffs()),
    };
    SpectralField::from_raw(out)
}

fn nonlinear_direct(c: &[Complex64]) -> Vec<Complex64> {
    let kmax = c.len() as i64;
    let at = |k: i64| -> Complex64 {
        match k {
            0 => ZERO,
            k if k > 0 => c[k as usize - 1],
            k => c[(-k) as usize - 1].conj(),
        }
    };
    (1..=kmax)
        .map(|k| {
            let mut s = ZERO;
            for k1 in (k - kmax)..=kmax {
                s += at(k1) * at(k - k1);
            }
            Complex64::new(0.0, -0.5 * k as f64) * s
        })
        .collect()
}

/// Reusable FFT plans for the quadratic nonlinearity at a fixed `kmax`.
#[derive(Clone)]
pub struct NonlinearKernel {
    kmax: usize,
    nx: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for NonlinearKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NonlinearKernel").field("kmax", &self.kmax).field("nx", &self.nx).finish()
    }
}

impl NonlinearKernel {
    pub fn new(kmax: usize) -> Self {
        let nx = default_grid(kmax);
        let mut planner = FftPlanner::new();
        NonlinearKernel {
            kmax,
            nx,
            forward: planner.plan_fft_forward(nx),
            inverse: planner.plan_fft_inverse(nx),
        }
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    /// `N(u)` for stored coefficients `c_1..=c_kmax`.
    pub fn apply(&self, c: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(c.len(), self.kmax, "kmax mismatch");
        let mut buf = spread(c, self.nx);
        self.inverse.process(&mut buf);
        for z in buf.iter_mut() {
            *z = Complex64::new(z.re * z.re, 0.0);
        }
        self.forward.process(&mut buf);
        let inv = 1.0 / self.nx as f64;
        (1..=self.kmax)
            .map(|k| Complex64::new(0.0, -0.5 * k as f64 * inv) * buf[k])
            .collect()
    }
}
