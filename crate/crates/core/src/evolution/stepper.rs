use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::spectral::{nonlinear_term, ConvolutionMode, NonlinearKernel, SpectralField};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Lawson-type RK4 on `e^{(gamma + i phase) t} u`.
    #[default]
    IntegratingFactorRk4,
}

/// Switch for the quadratic term, used by linear oracles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    #[default]
    Full,
    Disabled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub dt: f64,
    pub kmax: usize,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub nonlinearity: Nonlinearity,
    #[serde(default)]
    pub convolution: ConvolutionMode,
}

impl StepperConfig {
    pub fn new(dt: f64, kmax: usize) -> Result<Self> {
        let cfg = StepperConfig {
            dt,
            kmax,
            scheme: Scheme::default(),
            nonlinearity: Nonlinearity::default(),
            convolution: ConvolutionMode::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `min(0.1, 1 / (8 |g| kmax))`, an advective CFL-style heuristic.
    pub fn default_dt(norm_g: f64, kmax: usize) -> f64 {
        let cfl = 1.0 / (8.0 * norm_g * kmax as f64);
        if cfl.is_finite() {
            cfl.min(0.1)
        } else {
            0.1
        }
    }

    pub fn with_nonlinearity(mut self, n: Nonlinearity) -> Self {
        self.nonlinearity = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParams(format!("dt must be positive, got {}", self.dt)));
        }
        if self.kmax == 0 {
            return Err(Error::InvalidParams("kmax must be positive".into()));
        }
        Ok(())
    }
}

/// Precomputed factors for repeated steps with fixed `dt`, forcing and
/// parameters.
#[derive(Clone, Debug)]
pub struct Stepper {
    cfg: StepperConfig,
    forcing: Vec<Complex64>,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    kernel: Option<NonlinearKernel>,
}

impl Stepper {
    pub fn new(f: &SpectralField, cfg: StepperConfig, p: &PhysicalParams) -> Result<Self> {
        cfg.validate()?;
        if f.kmax() != cfg.kmax {
            return Err(Error::InvalidParams(format!(
                "forcing kmax {} differs from stepper kmax {}",
                f.kmax(),
                cfg.kmax
            )));
        }
        let factor = |h: f64| -> Vec<Complex64> {
            (1..=cfg.kmax as i64)
                .map(|k| super::propagator(k, h, p, true))
                .collect()
        };
        let kernel = match (cfg.nonlinearity, cfg.convolution) {
            (Nonlinearity::Full, ConvolutionMode::Fast) => Some(NonlinearKernel::new(cfg.kmax)),
            _ => None,
        };
        Ok(Stepper {
            cfg,
            forcing: f.coeffs().to_vec(),
            half: factor(0.5 * cfg.dt),
            full: factor(cfg.dt),
            kernel,
        })
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    /// `N(u) + f` on raw coefficients.
    fn rhs(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut out = match self.cfg.nonlinearity {
            Nonlinearity::Disabled => vec![Complex64::new(0.0, 0.0); u.len()],
            Nonlinearity::Full => match &self.kernel {
                Some(kernel) => kernel.apply(u),
                None => nonlinear_term(&SpectralField::from_raw(u.to_vec()), self.cfg.convolution).into_coeffs(),
            },
        };
        for (o, f) in out.iter_mut().zip(&self.forcing) {
            *o += f;
        }
        out
    }

    /// One step of size `dt`.
    pub fn advance(&self, u: &SpectralField) -> SpectralField {
        assert_eq!(u.kmax(), self.cfg.kmax, "kmax mismatch");
        let h = self.cfg.dt;
        let u = u.coeffs();
        let (eh, e) = (&self.half, &self.full);
        let n = u.len();

        let a = self.rhs(u);
        let u2: Vec<_> = (0..n).map(|i| eh[i] * (u[i] + 0.5 * h * a[i])).collect();
        let b = self.rhs(&u2);
        let u3: Vec<_> = (0..n).map(|i| eh[i] * u[i] + 0.5 * h * b[i]).collect();
        let c = self.rhs(&u3);
        let u4: Vec<_> = (0..n).map(|i| e[i] * u[i] + h * eh[i] * c[i]).collect();
        let d = self.rhs(&u4);
        let out = (0..n)
            .map(|i| e[i] * u[i] + h / 6.0 * (e[i] * a[i] + 2.0 * eh[i] * (b[i] + c[i]) + d[i]))
            .collect();
        SpectralField::from_raw(out)
    }
}

/// Single integrating-factor RK4 step.
pub fn step(u: &SpectralField, f: &SpectralField, cfg: &StepperConfig, p: &PhysicalParams) -> Result<SpectralField> {
    if u.kmax() != cfg.kmax {
        return Err(Error::InvalidParams("state and stepper kmax differ".into()));
    }
    Ok(Stepper::new(f, *cfg, p)?.advance(u))
}

fn step_count(duration: f64, dt: f64) -> Result<usize> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::Precondition(format!("run length must be positive, got {duration}")));
    }
    let n = (duration / dt).round();
    if n < 1.0 || (n * dt - duration).abs() > 1e-9 * duration.max(dt) {
        return Err(Error::Precondition(format!(
            "run length {duration} is not an integer multiple of dt = {dt}"
        )));
    }
    Ok(n as usize)
}

/// Runs from `t0` for `duration`, calling `observer(t, state)` on the initial
/// state and after every step, and returns the final state.
pub fn evolve_observed(
    g: &SpectralField,
    f: &SpectralField,
    t0: f64,
    duration: f64,
    cfg: &StepperConfig,
    p: &PhysicalParams,
    mut observer: impl FnMut(usize, f64, &SpectralField),
) -> Result<SpectralField> {
    if g.kmax() != cfg.kmax {
        return Err(Error::InvalidParams(format!(
            "initial data kmax {} differs from stepper kmax {}",
            g.kmax(),
            cfg.kmax
        )));
    }
    let n = step_count(duration, cfg.dt)?;
    let stepper = Stepper::new(f, *cfg, p)?;
    let mut u = g.clone();
    observer(0, t0, &u);
    for j in 1..=n {
        u = stepper.advance(&u);
        let t = t0 + j as f64 * cfg.dt;
        if !u.is_finite() {
            return Err(Error::NonFiniteState { t });
        }
        observer(j, t, &u);
    }
    Ok(u)
}

/// Runs from `t0` and keeps every `every`-th state.
pub fn evolve_recorded(
    g: &SpectralField,
    f: &SpectralField,
    t0: f64,
    duration: f64,
    cfg: &StepperConfig,
    p: &PhysicalParams,
    every: usize,
) -> Result<Trajectory> {
    if every == 0 {
        return Err(Error::Precondition("recording stride must be positive".into()));
    }
    let n = step_count(duration, cfg.dt)?;
    if n % every != 0 {
        return Err(Error::Precondition(format!(
            "{n} steps are not a multiple of the recording stride {every}"
        )));
    }
    let mut states = Vec::with_capacity(n / every + 1);
    evolve_observed(g, f, t0, duration, cfg, p, |j, _, u| {
        if j % every == 0 {
            states.push(u.clone());
        }
    })?;
    Trajectory::new(*p, t0, cfg.dt * every as f64, states, f.clone())
}

/// Integrates from `t = 0` to `t_final`, keeping every step.
pub fn evolve(
    g: &SpectralField,
    f: &SpectralField,
    t_final: f64,
    cfg: &StepperConfig,
    p: &PhysicalParams,
) -> Result<Trajectory> {
    evolve_recorded(g, f, 0.0, t_final, cfg, p, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::linear_propagate;
    use crate::spectral::random_field;

    #[test]
    fn linear_step_is_exact() {
        let p = PhysicalParams::new(1.0, 0.5, 0.7).unwrap();
        let u = random_field(16, 1.0, 1.0, 1);
        let cfg = StepperConfig::new(0.013, 16).unwrap().with_nonlinearity(Nonlinearity::Disabled);
        let next = step(&u, &SpectralField::zeros(16), &cfg, &p).unwrap();
        let exact = linear_propagate(&u, 0.013, &p, true);
        for (a, b) in next.coeffs().iter().zip(exact.coeffs()) {
            assert!((a - b).norm() <= 1e-14);
        }
    }

    #[test]
    fn run_length_must_divide() {
        let p = PhysicalParams::new(1.0, 0.0, 1.0).unwrap();
        let cfg = StepperConfig::new(0.3, 4).unwrap();
        let z = SpectralField::zeros(4);
        assert!(evolve(&z, &z, 1.0, &cfg, &p).is_err());
        let tr = evolve(&z, &z, 0.9, &cfg, &p).unwrap();
        assert_eq!(tr.len(), 4);
        assert!(tr.states().iter().all(SpectralField::is_zero));
    }

    #[test]
    fn default_dt_rule() {
        assert_eq!(StepperConfig::default_dt(0.0, 64), 0.1);
        assert_eq!(StepperConfig::default_dt(1.0, 64), 1.0 / 512.0);
    }
}
