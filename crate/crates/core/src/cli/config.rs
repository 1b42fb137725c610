use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bourgain::SampleGrid;
use crate::error::{Error, Result};
use crate::evolution::{Checkpoint, StepperConfig};
use crate::experiments::{sha256_hex, InputSummary};
use crate::normal_form::ForcingArgument;
use crate::params::PhysicalParams;
use crate::spectral::{random_field, ConvolutionMode, SpectralField};

/// Largest `kmax` a config may request.
pub const MAX_KMAX: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Evolve,
    Picard,
    NormalFormResidual,
    MultilinearScan,
    BourgainScan,
    ResonanceCount,
    Absorbing,
    Smoothing,
    Attractor,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Evolve,
        Experiment::Picard,
        Experiment::NormalFormResidual,
        Experiment::MultilinearScan,
        Experiment::BourgainScan,
        Experiment::ResonanceCount,
        Experiment::Absorbing,
        Experiment::Smoothing,
        Experiment::Attractor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Evolve => "evolve",
            Experiment::Picard => "picard",
            Experiment::NormalFormResidual => "normal-form-residual",
            Experiment::MultilinearScan => "multilinear-scan",
            Experiment::BourgainScan => "bourgain-scan",
            Experiment::ResonanceCount => "resonance-count",
            Experiment::Absorbing => "absorbing",
            Experiment::Smoothing => "smoothing",
            Experiment::Attractor => "attractor",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }
}

/// How a spectrum is obtained.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    #[default]
    Zero,
    /// [`random_field`] with an optional rescaling to a prescribed L^2 norm.
    /// A missing seed falls back to the run seed.
    Random {
        decay: f64,
        #[serde(default = "unit")]
        scale: f64,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        norm: Option<f64>,
    },
    /// `amplitude * cos(k x)`.
    Cosine { k: i64, amplitude: f64 },
    /// Spectrum JSON or a checkpoint file.
    File { path: PathBuf },
}

fn unit() -> f64 {
    1.0
}

impl FieldSpec {
    pub fn build(&self, kmax: usize, run_seed: u64) -> Result<SpectralField> {
        match self {
            FieldSpec::Zero => Ok(SpectralField::zeros(kmax)),
            FieldSpec::Random { decay, scale, seed, norm } => {
                if !decay.is_finite() || !scale.is_finite() {
                    return Err(Error::Config("random field decay and scale must be finite".into()));
                }
                let field = random_field(kmax, *decay, *scale, seed.unwrap_or(run_seed));
                match norm {
                    Some(n) => normalized(&field, *n),
                    None => Ok(field),
                }
            }
            FieldSpec::Cosine { k, amplitude } => {
                if *k < 1 || *k as usize > kmax || !amplitude.is_finite() {
                    return Err(Error::Config(format!("cosine mode {k} must lie in 1..={kmax} with finite amplitude")));
                }
                SpectralField::from_fn(kmax, |j| {
                    if j == *k {
                        Complex64::new(amplitude / 2.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            }
            FieldSpec::File { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                let field = match SpectralField::from_json_str(&text) {
                    Ok(f) => f,
                    Err(_) => Checkpoint::from_json_str(&text)?.field,
                };
                if field.kmax() != kmax {
                    return Err(Error::Config(format!(
                        "{} holds kmax = {}, config asks for {kmax}",
                        path.display(),
                        field.kmax()
                    )));
                }
                Ok(field)
            }
        }
    }

    /// Same shape with a different random seed; other kinds are unchanged.
    fn reseeded(&self, seed: u64) -> FieldSpec {
        match self {
            FieldSpec::Random { decay, scale, norm, .. } => FieldSpec::Random {
                decay: *decay,
                scale: *scale,
                seed: Some(seed),
                norm: *norm,
            },
            other => other.clone(),
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            FieldSpec::Random { seed, .. } => *seed,
            _ => None,
        }
    }
}

/// `field` rescaled to L^2 norm `norm`.
pub fn normalized(field: &SpectralField, norm: f64) -> Result<SpectralField> {
    if !(norm >= 0.0 && norm.is_finite()) {
        return Err(Error::Config(format!("target norm must be finite and nonnegative, got {norm}")));
    }
    let current = field.l2_norm();
    if current == 0.0 {
        return if norm == 0.0 {
            Ok(field.clone())
        } else {
            Err(Error::Config("cannot rescale a zero field".into()))
        };
    }
    Ok(field.scaled(norm / current))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PicardSection {
    pub delta: f64,
    pub iters: usize,
    pub quad_nodes: usize,
    /// Steps of the reference integration over `[0, delta]`; 0 skips it.
    pub compare_steps: usize,
    pub tolerance: f64,
}

impl Default for PicardSection {
    fn default() -> Self {
        PicardSection {
            delta: 0.05,
            iters: 8,
            quad_nodes: 1024,
            compare_steps: 1600,
            tolerance: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResidualSection {
    /// Evaluation time; defaults to the end of the run.
    pub t: Option<f64>,
    pub stride: usize,
    pub forcing_argument: ForcingArgument,
    pub tolerance: f64,
}

impl Default for ResidualSection {
    fn default() -> Self {
        ResidualSection {
            t: None,
            stride: 1,
            forcing_argument: ForcingArgument::Plain,
            tolerance: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultilinearSection {
    pub trials: usize,
    pub s: f64,
}

impl Default for MultilinearSection {
    fn default() -> Self {
        MultilinearSection { trials: 100, s: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BourgainScanKind {
    Bilinear,
    L4,
    L6,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BourgainSection {
    pub scan: BourgainScanKind,
    pub trials: usize,
    pub s: f64,
    /// `L^4` time cutoff.
    pub delta: f64,
    /// `L^6` Sobolev exponent, time span and `kmax` ladder.
    pub eps: f64,
    pub span: f64,
    pub kmaxes: Vec<usize>,
    /// Slope bound for the `L^6` maxima against `kmax`.
    pub slope_max: f64,
    pub grid: SampleGrid,
    /// Frozen maximum ratio to compare against.
    pub baseline: Option<f64>,
    pub baseline_tolerance: f64,
}

impl Default for BourgainSection {
    fn default() -> Self {
        BourgainSection {
            scan: BourgainScanKind::Bilinear,
            trials: 500,
            s: 0.0,
            delta: 0.5,
            eps: 0.1,
            span: 2.0 * PI,
            kmaxes: vec![8, 16, 32, 64],
            slope_max: 0.1,
            grid: SampleGrid::default(),
            baseline: None,
            baseline_tolerance: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResonanceSection {
    /// Dyadic sweep `K = 1, 2, ..., sweep_top`; `None` skips the sweep.
    pub sweep_top: Option<i64>,
    /// Single shell `[kmin, kmax]` whose full table is written.
    pub shell: Option<[i64; 2]>,
    /// Gap statistics for `Delta = 1..=gap_delta_max`.
    pub gap_delta_max: Option<i64>,
    pub gap_nmax: i64,
}

impl Default for ResonanceSection {
    fn default() -> Self {
        ResonanceSection {
            sweep_top: Some(64),
            shell: None,
            gap_delta_max: Some(32),
            gap_nmax: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSection {
    /// L^2 norm of each member.
    pub norms: Vec<f64>,
    /// Draw a fresh random shape per member (seed + index) or rescale one
    /// shared shape.
    pub vary_shape: bool,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        EnsembleSection {
            norms: (0..8).map(|i| 0.5 + 4.5 * i as f64 / 7.0).collect(),
            vary_shape: true,
        }
    }
}

/// A fully specified run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub params: PhysicalParams,
    pub kmax: usize,
    /// Time step; by default `StepperConfig::default_dt` shrunk to divide `t_final`.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "unit", alias = "T")]
    pub t_final: f64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub initial: FieldSpec,
    #[serde(default)]
    pub forcing: FieldSpec,
    /// Keep every n-th step in `timeseries.csv`.
    #[serde(default = "one")]
    pub record_every: usize,
    /// Write a checkpoint every n steps (evolve only).
    #[serde(default)]
    pub checkpoint_every: Option<usize>,
    #[serde(default)]
    pub convolution: ConvolutionMode,
    #[serde(default)]
    pub picard: PicardSection,
    #[serde(default)]
    pub residual: ResidualSection,
    #[serde(default)]
    pub multilinear: MultilinearSection,
    #[serde(default)]
    pub bourgain: BourgainSection,
    #[serde(default)]
    pub resonance: ResonanceSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn one() -> usize {
    1
}

impl RunConfig {
    /// Deserializes and validates a JSON value.
    pub fn from_value(value: Value) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.require_nonresonant()?;
        if self.kmax == 0 || self.kmax > MAX_KMAX {
            return Err(Error::Config(format!("kmax must lie in 1..={MAX_KMAX}, got {}", self.kmax)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("t_final must be positive, got {}", self.t_final)));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Config(format!("dt must be positive, got {dt}")));
            }
        }
        if self.record_every == 0 || self.checkpoint_every == Some(0) {
            return Err(Error::Config("record_every and checkpoint_every must be positive".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, with the output directory left out.
    pub fn digest(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serialization is infallible");
        if let Value::Object(map) = &mut v {
            map.remove("output_dir");
        }
        let bytes = serde_json::to_vec(&v).expect("config serialization is infallible");
        sha256_hex(&bytes)
    }

    pub fn initial_field(&self) -> Result<SpectralField> {
        self.initial.build(self.kmax, self.seed)
    }

    pub fn forcing_field(&self) -> Result<SpectralField> {
        self.forcing.build(self.kmax, self.seed.wrapping_add(1))
    }

    /// Ensemble members built from the initial-data spec.
    pub fn ensemble_fields(&self) -> Result<Vec<SpectralField>> {
        if self.ensemble.norms.is_empty() {
            return Err(Error::Config("ensemble.norms is empty".into()));
        }
        let base_seed = self.initial.seed().unwrap_or(self.seed);
        self.ensemble
            .norms
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let spec = if self.ensemble.vary_shape {
                    self.initial.reseeded(base_seed.wrapping_add(i as u64))
                } else {
                    self.initial.clone()
                };
                normalized(&spec.build(self.kmax, self.seed)?, n)
            })
            .collect()
    }

    /// Seeds that feed the random inputs, for the report.
    pub fn input_seeds(&self) -> Vec<u64> {
        let mut seeds = vec![self.seed];
        seeds.extend(self.initial.seed());
        seeds.extend(self.forcing.seed());
        seeds
    }

    /// Stepper settings: the configured `dt`, or the default step for the
    /// largest data norm reduced until it divides `t_final`.
    pub fn stepper(&self, largest_norm: f64, t_final: f64) -> Result<StepperConfig> {
        let dt = match self.dt {
            Some(dt) => dt,
            None => {
                let guess = StepperConfig::default_dt(largest_norm, self.kmax);
                t_final / (t_final / guess).ceil()
            }
        };
        let mut cfg = StepperConfig::new(dt, self.kmax)?;
        cfg.convolution = self.convolution;
        Ok(cfg)
    }

    pub fn summarize_inputs(&self, gs: &[SpectralField], f: &SpectralField) -> InputSummary {
        let mut s = InputSummary::new(gs, f);
        s.seeds = self.input_seeds();
        s
    }
}

/// Reads a JSON config, applies `--set` overrides and the subcommand's
/// experiment, then validates.
pub fn load_config(path: Option<&Path>, overrides: &[String], experiment: Option<Experiment>) -> Result<RunConfig> {
    let mut value = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            serde_json::from_str::<Value>(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
        }
        None => Value::Object(Default::default()),
    };
    for o in overrides {
        super::overrides::apply_override(&mut value, o)?;
    }
    if let Some(e) = experiment {
        let name = Value::String(e.name().to_string());
        match value.get("experiment") {
            Some(existing) if *existing != name => {
                return Err(Error::Config(format!(
                    "config names experiment {existing} but the subcommand is {}",
                    e.name()
                )));
            }
            _ => {}
        }
        if let Value::Object(map) = &mut value {
            map.insert("experiment".into(), name);
        }
    }
    RunConfig::from_value(value)
}

/// [`load_config`] without overrides.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    load_config(Some(path), &[], None)
}
