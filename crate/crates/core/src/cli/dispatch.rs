use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{BourgainScanKind, Experiment, RunConfig};
use crate::bourgain::{bilinear_scan, l4_scan, l6_scan, ScanReport};
use crate::error::{Error, Result};
use crate::evolution::{
    energy_law_residual, evolve, evolve_observed, picard_solve_with, Checkpoint, PicardConfig, StepperConfig, Trajectory,
};
use crate::experiments::{
    run_absorbing_ball, run_attractor_ensemble, run_smoothing, Assertion, ExperimentReport, TimeSeries,
};
use crate::normal_form::{duhamel_residual_with, multilinear_constants, DuhamelOptions, DuhamelResidualReport};
use crate::resonance::{dyadic_sweep, enumerate_apq, gamma_gap_stats, sweep_csv, GAP_RATIO_FLOOR};
use crate::spectral::SpectralField;

/// Smallest dyadic `K` at which the resonance count must grow sublinearly.
pub const SUBLINEAR_FROM_K: i64 = 16;

/// What a run produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub experiment: Experiment,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
    pub files: Vec<PathBuf>,
}

struct Artifacts {
    dir: PathBuf,
    digest: String,
    files: Vec<PathBuf>,
}

impl Artifacts {
    fn new(dir: &Path, digest: String) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            digest,
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        self.files.push(path);
        Ok(())
    }

    /// CSV with a leading `# config-digest:` comment line.
    fn csv(&mut self, name: &str, body: &str) -> Result<()> {
        self.write(name, &format!("# config-digest: {}\n{body}", self.digest))
    }

    fn checkpoint(&mut self, step: usize, t: f64, cfg: &RunConfig, u: &SpectralField) -> Result<()> {
        let c = Checkpoint {
            t,
            params: cfg.params,
            field: u.clone(),
            config_digest: Some(self.digest.clone()),
        };
        self.write(&format!("checkpoint-{step:09}.json"), &(c.to_json_string() + "\n"))
    }
}

/// Everything a run reports besides its files.
struct RunResult {
    assertions: Vec<Assertion>,
    summary: BTreeMap<String, f64>,
    details: Value,
}

/// Runs the configured experiment and writes `report.json` plus its tables
/// into the output directory.
pub fn dispatch(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let digest = cfg.digest();
    let mut out = Artifacts::new(&cfg.output_dir, digest.clone())?;
    let run = match cfg.experiment {
        Experiment::Evolve => run_evolve(cfg, &mut out),
        Experiment::Picard => run_picard(cfg, &mut out),
        Experiment::NormalFormResidual => run_residual(cfg, &mut out),
        Experiment::MultilinearScan => run_multilinear(cfg, &mut out),
        Experiment::BourgainScan => run_bourgain(cfg, &mut out),
        Experiment::ResonanceCount => run_resonance(cfg, &mut out),
        Experiment::Absorbing | Experiment::Smoothing | Experiment::Attractor => run_study(cfg, &mut out),
    }?;
    let passed = run.assertions.iter().all(|a| a.passed);
    let report = json!({
        "experiment": cfg.experiment.name(),
        "config_digest": digest,
        "config": cfg,
        "passed": passed,
        "assertions": run.assertions,
        "summary": run.summary,
        "details": run.details,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serialization is infallible");
    out.write("report.json", &(text + "\n"))?;
    Ok(Outcome {
        experiment: cfg.experiment,
        passed,
        assertions: run.assertions,
        files: out.files,
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serialization is infallible")
}

/// `t,L2,H1,H2,energy_residual`; the residual is a centered difference and is
/// left empty at both ends.
fn trajectory_csv(traj: &Trajectory) -> Result<String> {
    let residual = if traj.len() >= 3 { energy_law_residual(traj)? } else { Vec::new() };
    let mut out = String::from("t,L2,H1,H2,energy_residual\n");
    for (j, u) in traj.states().iter().enumerate() {
        write!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},",
            traj.time(j),
            u.l2_norm(),
            u.sobolev_norm(1.0),
            u.sobolev_norm(2.0)
        )
        .unwrap();
        if j >= 1 && j <= residual.len() {
            write!(out, "{:.16e}", residual[j - 1]).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn run_evolve(cfg: &RunConfig, out: &mut Artifacts) -> Result<RunResult> {
    let g = cfg.initial_field()?;
    let f = cfg.forcing_field()?;
    let stepper = cfg.stepper(g.l2_norm(), cfg.t_final)?;
    let every = cfg.record_every;
    let mut states = Vec::new();
    let mut pending: Vec<(usize, f64, SpectralField)> = Vec::new();
    let mut steps = 0;
    let last = evolve_observed(&g, &f, 0.0, cfg.t_final, &stepper, &cfg.params, |j, t, u| {
        if j % every == 0 {
            states.push(u.clone());
        }
        if let Some(c) = cfg.checkpoint_every {
            if j > 0 && j % c == 0 {
                pending.push((j, t, u.clone()));
            }
        }
        steps = j;
    })?;
    if steps % every != 0 {
        return Err(Error::Precondition(format!(
            "{steps} steps are not a multiple of record_every = {every}"
        )));
    }
    let dt = stepper.dt;
    for (j, t, u) in &pending {
        out.checkpoint(*j, *t, cfg, u)?;
    }
    if pending.last().map(|p| p.0) != Some(steps) {
        out.checkpoint(steps, steps as f64 * dt, cfg, &last)?;
    }
    let traj = Trajectory::new(cfg.params, 0.0, dt * every as f64, states, f.clone())?;
    out.csv("timeseries.csv", &trajectory_csv(&traj)?)?;
    let residual = if traj.len() >= 3 { energy_law_residual(&traj)? } else { Vec::new() };
    let mut summary = BTreeMap::new();
    summary.insert("dt".into(), dt);
    summary.insert("steps".into(), steps as f64);
    summary.insert("initial_l2".into(), g.l2_norm());
    summary.insert("final_l2".into(), last.l2_norm());
    summary.insert("final_h2".into(), last.sobolev_norm(2.0));
    summary.insert("max_abs_energy_residual".into(), max_abs(&residual));
    Ok(RunResult {
        assertions: vec![Assertion::at_most(
            "state_finite",
            if last.is_finite() { 0.0 } else { 1.0 },
            0.0,
            "every stored coefficient is finite",
        )],
        summary,
        details: json!({ "stepper": stepper, "inputs": cfg.summarize_inputs(&[g], &f) }),
    })
}

fn run_picard(cfg: &RunConfig, out: &mut Artifacts) -> Result<RunResult> {
    let sec = &cfg.picard;
    let g = cfg.initial_field()?;
    let f = cfg.forcing_field()?;
    let sol = picard_solve_with(&g, &f, sec.delta, &PicardConfig::new(sec.iters, sec.quad_nodes), &cfg.params)?;
    let mut csv = String::from("t,L2,H1,H2\n");
    for (j, (t, u)) in sol.nodes.iter().zip(&sol.states).enumerate() {
        if j % cfg.record_every == 0 || j + 1 == sol.nodes.len() {
            writeln!(
                csv,
                "{t:.16e},{:.16e},{:.16e},{:.16e}",
                u.l2_norm(),
                u.sobolev_norm(1.0),
                u.sobolev_norm(2.0)
            )
            .unwrap();
        }
    }
    out.csv("timeseries.csv", &csv)?;
    let mut contraction = String::from("iterate,max_l2_change\n");
    for (i, c) in sol.contraction.iter().enumerate() {
        writeln!(contraction, "{},{c:.16e}", i + 1).unwrap();
    }
    out.csv("table.csv", &contraction)?;

    let mut summary = BTreeMap::new();
    summary.insert("final_l2".into(), sol.state.l2_norm());
    summary.insert("last_contraction".into(), sol.contraction.last().copied().unwrap_or(0.0));
    let mut assertions = Vec::new();
    if sec.compare_steps > 0 {
        let mut step_cfg = StepperConfig::new(sec.delta / sec.compare_steps as f64, cfg.kmax)?;
        step_cfg.convolution = cfg.convolution;
        let reference = evolve(&g, &f, sec.delta, &step_cfg, &cfg.params)?;
        let diff = sol.state.sub(reference.last()).l2_norm();
        summary.insert("stepper_difference".into(), diff);
        assertions.push(Assertion::at_most(
            "matches_stepper",
            diff,
            sec.tolerance,
            format!("L2 distance to the stepper with {} steps at t = delta", sec.compare_steps),
        ));
    }
    Ok(RunResult {
        assertions,
        summary,
        details: json!({ "contraction": sol.contraction, "inputs": cfg.summarize_inputs(&[g], &f) }),
    })
}

fn run_residual(cfg: &RunConfig, out: &mut Artifacts) -> Result<RunResult> {
    let sec = &cfg.residual;
    let g = cfg.initial_field()?;
    let f = cfg.forcing_field()?;
    let stepper = cfg.stepper(g.l2_norm(), cfg.t_final)?;
    let traj = evolve(&g, &f, cfg.t_final, &stepper, &cfg.params)?;
    let opts = DuhamelOptions {
        forcing_argument: sec.forcing_argument,
        stride: sec.stride,
        nonlinear: true,
    };
    let t = sec.t.unwrap_or(cfg.t_final);
    let report = duhamel_residual_with(&traj, &g, &f, t, &opts)?;
    out.csv("timeseries.csv", &trajectory_csv(&traj.subsampled(cfg.record_every))?)?;
    out.csv("table.csv", &format!("{}\n{}\n", DuhamelResidualReport::CSV_HEADER, report.csv_row()))?;
    let mut summary = BTreeMap::new();
    summary.insert("total_relative".into(), report.total_relative);
    summary.insert("quadrature_nodes".into(), report.quadrature_nodes as f64);
    summary.insert("dt".into(), stepper.dt);
    Ok(RunResult {
        assertions: vec![Assertion::at_most(
            "representation_residual",
            report.total_relative,
            sec.tolerance,
            format!("relative H^2 residual at t = {t}"),
        )],
        summary,
        details: json!({
            "term_magnitudes": report.term_magnitudes,
            "per_mode_residual": report.per_mode_residual,
            "inputs": cfg.summarize_inputs(&[g], &f),
        }),
    })
}

fn run_multilinear(cfg: &RunConfig, out: &mut Artifacts) -> Result<RunResult> {
    let sec = &cfg.multilinear;
    let report = multilinear_constants(sec.trials, cfg.kmax, sec.s, cfg.seed, &cfg.params)?;
    let mut csv = String::from("trial,bilinear,resonant_self,resonant_pair\n");
    for (i, r) in report.samples.iter().enumerate() {
        writeln!(csv, "{i},{:.16e},{:.16e},{:.16e}", r.bilinear, r.resonant_self, r.resonant_pair).unwrap();
    }
    out.csv("scan.csv", &csv)?;
    let finite = [&report.bilinear, &report.resonant_self, &report.resonant_pair].iter().all(|s| s.all_finite());
    let mut summary = BTreeMap::new();
    summary.insert("bilinear_max".into(), report.bilinear.max);
    summary.insert("resonant_self_max".into(), report.resonant_self.max);
    summary.insert("resonant_pair_max".into(), report.resonant_pair.max);
    Ok(RunResult {
        assertions: vec![Assertion::at_most(
            "ratios_finite",
            if finite { 0.0 } else { 1.0 },
            0.0,
            "every ratio statistic is finite",
        )],
        summary,
        details: json!({
            "bilinear": report.bilinear,
            "resonant_self": report.resonant_self,
            "resonant_pair": report.resonant_pair,
        }),
    })
}

fn run_bourgain(cfg: &RunConfig, out: &mut Artifacts) -> Result<RunResult> {
    let sec = &cfg.bourgain;
    let p = &cfg.params;
    let report: ScanReport = match sec.scan {
        BourgainScanKind::Bilinear => bilinear_scan(sec.trials, cfg.kmax, sec.s, &sec.grid, cfg.seed, p)?,
        BourgainScanKind::L4 => l4_scan(sec.trials, cfg.kmax, sec.delta, &sec.grid, cfg.seed, p)?,
        BourgainScanKind::L6 => l6_scan(sec.trials, &sec.kmaxes, sec.eps, sec.span, cfg.seed, p)?,
    };
    out.csv("scan.csv", &report.to_csv())?;
    let mut assertions = vec![Assertion::at_most(
        "ratios_finite",
        if report.stats.all_finite() { 0.0 } else { 1.0 },
        0.0,
        "every ratio is finite",
    )];
    if let Some(base) = sec.baseline {
        assertions.push(Assertion::at_most(
            "matches_baseline",
            (report.stats.max - base).abs() / base.abs(),
            sec.baseline_tolerance,
            format!("relative distance of the maximum ratio to {base}"),
        ));
    }
    if let Some(slope) = report.loglog_slope {
        assertions.push(Assertion::at_most(
            "l6_growth",
            slope,
            sec.slope_max,
            "log-log slope of the per-kmax maxima",
        ));
    }
    let mut summary = BTreeMap::new();
    summary.insert("max".into(), report.stats.max);
    summary.insert("mean".into(), report.stats.mean);
    if let Some(slope) = report.loglog_slope {
        summary.insert("loglog_slope".into(), slope);
    }
    Ok(RunResult {
        assertions,
        summary,
        details: json!({ "stats": report.stats, "max_by_kmax": report.max_by_kmax }),
    })
}

fn run_resonance(cfg: &RunConfig, out: &mut Artifacts) -> Result<RunResult> {
    let sec = &cfg.resonance;
    let p = &cfg.params;
    let mut assertions = Vec::new();
    let mut summary = BTreeMap::new();
    let mut details = serde_json::Map::new();
    if let Some(top) = sec.sweep_top {
        let rows = dyadic_sweep(top, p)?;
        out.csv("sweep.csv", &sweep_csv(&rows))?;
        let unverified = rows.iter().filter(|r| !r.verified).count();
        assertions.push(Assertion::at_most(
            "triples_verified",
            unverified as f64,
            0.0,
            "shells with a stored triple that fails exact re-verification",
        ));
        let exponent = rows
            .iter()
            .filter(|r| r.k >= SUBLINEAR_FROM_K)
            .map(|r| (r.max_count as f64).ln() / (r.k as f64).ln())
            .fold(f64::NEG_INFINITY, f64::max);
        if exponent.is_finite() {
            assertions.push(Assertion {
                name: "sublinear_growth".into(),
                passed: exponent < 1.0,
                value: exponent,
                tolerance: 1.0,
                detail: format!("max over K >= {SUBLINEAR_FROM_K} of log(max_count) / log K, must stay below 1"),
            });
            summary.insert("growth_exponent".into(), exponent);
        }
        if let Some(r) = rows.last() {
            summary.insert("max_count".into(), r.max_count as f64);
            summary.insert("nondegenerate_max_count".into(), r.nondegenerate_max_count as f64);
        }
        details.insert("sweep".into(), to_value(&rows));
    }
    if let Some([lo, hi]) = sec.shell {
        let table = enumerate_apq(lo, hi, p)?;
        out.csv("table.csv", &table.to_csv())?;
        assertions.push(Assertion::at_most(
            "table_verified",
            if table.verify()? { 0.0 } else { 1.0 },
            0.0,
            format!("exact re-verification of the shell [{lo}, {hi}]"),
        ));
        summary.insert("shell_triples".into(), table.total() as f64);
        summary.insert("shell_max_count".into(), table.max_count as f64);
    }
    if let Some(dmax) = sec.gap_delta_max {
        let gaps = (1..=dmax).map(|d| gamma_gap_stats(d, sec.gap_nmax, p)).collect::<Result<Vec<_>>>()?;
        let mut csv = String::from("delta,nmax,min_gap,argmin_n,ratio\n");
        for r in &gaps {
            writeln!(csv, "{},{},{:.16e},{},{:.16e}", r.delta, r.nmax, r.min_gap, r.argmin_n, r.ratio).unwrap();
        }
        out.csv("gaps.csv", &csv)?;
        let floor = gaps.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        assertions.push(Assertion::above(
            "gap_floor",
            floor,
            GAP_RATIO_FLOOR,
            "min over Delta of min_gap / Delta^4",
        ));
        summary.insert("gap_ratio_min".into(), floor);
        details.insert("gaps".into(), to_value(&gaps));
    }
    Ok(RunResult {
        assertions,
        summary,
        details: Value::Object(details),
    })
}

/// `member,t,...` rows from every series of a study.
fn series_csv(series: &[TimeSeries]) -> String {
    let columns = series.first().map(|s| s.columns.join(",")).unwrap_or_default();
    let mut out = format!("member,t,{columns}\n");
    for s in series {
        for (j, t) in s.t.iter().enumerate() {
            write!(out, "{},{t:.16e}", s.label).unwrap();
            for col in &s.values {
                write!(out, ",{:.16e}", col[j]).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

fn run_study(cfg: &RunConfig, out: &mut Artifacts) -> Result<RunResult> {
    let f = cfg.forcing_field()?;
    let p = &cfg.params;
    let report: ExperimentReport = match cfg.experiment {
        Experiment::Smoothing => {
            let g = cfg.initial_field()?;
            let stepper = cfg.stepper(g.l2_norm(), cfg.t_final)?;
            let mut r = run_smoothing(&g, &f, p, cfg.t_final, &stepper)?;
            r.inputs.seeds = cfg.input_seeds();
            r
        }
        kind => {
            let gs = cfg.ensemble_fields()?;
            let largest = gs.iter().map(SpectralField::l2_norm).fold(0.0, f64::max);
            let stepper = cfg.stepper(largest, cfg.t_final)?;
            let mut r = if kind == Experiment::Absorbing {
                run_absorbing_ball(&gs, &f, p, cfg.t_final, &stepper)?
            } else {
                run_attractor_ensemble(&gs, &f, p, cfg.t_final, &stepper)?
            };
            r.inputs.seeds = cfg.input_seeds();
            r
        }
    };
    out.csv("timeseries.csv", &series_csv(&report.series))?;
    Ok(RunResult {
        assertions: report.assertions,
        summary: report.summary,
        details: json!({
            "name": report.name,
            "inputs": report.inputs,
            "provenance": report.provenance,
        }),
    })
}
