use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::spectral::SpectralField;

/// Uniformly sampled solution `u(t_j)`, `t_j = t0 + j dt`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    params: PhysicalParams,
    t0: f64,
    dt: f64,
    states: Vec<SpectralField>,
    forcing: SpectralField,
}

impl Trajectory {
    pub fn new(
        params: PhysicalParams,
        t0: f64,
        dt: f64,
        states: Vec<SpectralField>,
        forcing: SpectralField,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) || !t0.is_finite() {
            return Err(Error::InvalidParams("trajectory needs finite t0 and dt > 0".into()));
        }
        let kmax = forcing.kmax();
        if states.is_empty() {
            return Err(Error::InvalidParams("trajectory needs at least one state".into()));
        }
        if let Some(j) = states.iter().position(|u| u.kmax() != kmax) {
            return Err(Error::InvalidParams(format!("state {j} has a different kmax")));
        }
        if let Some(j) = states.iter().position(|u| !u.is_finite()) {
            return Err(Error::NonFiniteState { t: t0 + j as f64 * dt });
        }
        Ok(Trajectory {
            params,
            t0,
            dt,
            states,
            forcing,
        })
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn kmax(&self) -> usize {
        self.forcing.kmax()
    }

    pub fn forcing(&self) -> &SpectralField {
        &self.forcing
    }

    pub fn states(&self) -> &[SpectralField] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.time(j)).collect()
    }

    pub fn start(&self) -> f64 {
        self.t0
    }

    pub fn end(&self) -> f64 {
        self.time(self.len() - 1)
    }

    pub fn last(&self) -> &SpectralField {
        self.states.last().expect("trajectory is never empty")
    }

    /// Sample index of `t`, which must lie on the grid within `1e-9 dt`.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let x = (t - self.t0) / self.dt;
        let j = x.round();
        if !(j >= 0.0) || j as usize >= self.len() || (x - j).abs() > 1e-9 {
            return Err(Error::TimeOutOfRange {
                t,
                start: self.start(),
                end: self.end(),
            });
        }
        Ok(j as usize)
    }

    /// Every `stride`-th sample, starting with the first.
    pub fn subsampled(&self, stride: usize) -> Trajectory {
        assert!(stride > 0);
        Trajectory {
            params: self.params,
            t0: self.t0,
            dt: self.dt * stride as f64,
            states: self.states.iter().step_by(stride).cloned().collect(),
            forcing: self.forcing.clone(),
        }
    }
}

/// Centered-difference check of `d/dt |u|^2 = -2 gamma |u|^2 + 2 <f, u>` at
/// every interior sample.
pub fn energy_law_residual(traj: &Trajectory) -> Result<Vec<f64>> {
    if traj.len() < 3 {
        return Err(Error::Precondition("energy residual needs at least 3 samples".into()));
    }
    let gamma = traj.params().gamma();
    let f = traj.forcing();
    let energy: Vec<f64> = traj.states().iter().map(|u| u.l2_norm().powi(2)).collect();
    Ok((1..traj.len() - 1)
        .map(|j| {
            let lhs = (energy[j + 1] - energy[j - 1]) / (2.0 * traj.dt());
            let rhs = -2.0 * gamma * energy[j] + 2.0 * f.inner(&traj.states()[j]);
            lhs - rhs
        })
        .collect())
}

/// Resumable snapshot `{"t": .., "params": {..}, "field": <spectrum>}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub t: f64,
    pub params: PhysicalParams,
    pub field: SpectralField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_digest: Option<String>,
}

impl Checkpoint {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let c: Checkpoint = serde_json::from_str(s)?;
        if !c.t.is_finite() {
            return Err(Error::InvalidField("checkpoint time is not finite".into()));
        }
        Ok(c)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serialization is infallible")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n").map_err(|e| Error::io(path, e))
    }
}
