use std::collections::BTreeMap;

use rayon::prelude::*;

use super::report::{Assertion, ExperimentReport, InputSummary, Provenance, TimeSeries};
use crate::error::{Error, Result};
use crate::evolution::{absorbing_time, evolve_observed, linear_propagate, StepperConfig};
use crate::params::PhysicalParams;
use crate::spectral::SpectralField;
use crate::stats::least_squares_slope;

/// Slack on the energy envelope and the ball radius.
pub const ENVELOPE_SLACK: f64 = 1e-6;
/// Largest accepted log-slope per unit time over the final half of a run.
pub const PLATEAU_SLOPE_MAX: f64 = 1e-3;
/// Relative spread allowed between stabilized radii of an ensemble.
pub const RADIUS_AGREEMENT: f64 = 0.2;
/// Minimum `|g|_{H^2} / |g|` for data to count as rough.
pub const ROUGHNESS_MIN: f64 = 10.0;
/// Required factor between `|g|_{H^2}` and the smoothing plateau.
pub const CONTRAST_MIN: f64 = 5.0;
/// Grace period after the absorbing time for the whole ensemble.
pub const BALL_GRACE: f64 = 1.0;
/// With zero forcing the stabilized radius must fall below this.
pub const ZERO_FORCING_RADIUS: f64 = 1e-6;
/// Target number of recorded samples per trajectory.
pub const RECORDED_SAMPLES: usize = 1000;

fn step_total(t_final: f64, cfg: &StepperConfig) -> Result<usize> {
    let n = (t_final / cfg.dt).round();
    if !(t_final > 0.0) || (n * cfg.dt - t_final).abs() > 1e-9 * t_final {
        return Err(Error::InvalidParams(format!(
            "T = {t_final} is not a positive multiple of dt = {}",
            cfg.dt
        )));
    }
    Ok(n as usize)
}

fn provenance(cfg: &StepperConfig, t_final: f64, stride: usize) -> Provenance {
    Provenance {
        dt: cfg.dt,
        kmax: cfg.kmax,
        t_final,
        record_every: stride,
        scheme: format!("{:?}", cfg.scheme),
    }
}

fn check_inputs(gs: &[SpectralField], f: &SpectralField, cfg: &StepperConfig) -> Result<()> {
    if gs.is_empty() {
        return Err(Error::InvalidParams("ensemble is empty".into()));
    }
    if gs.iter().chain(std::iter::once(f)).any(|v| v.kmax() != cfg.kmax) {
        return Err(Error::InvalidParams("field kmax differs from stepper kmax".into()));
    }
    Ok(())
}

/// Least-squares slope of `ln v` against `t` over samples with `t >= from`.
pub fn final_log_slope(t: &[f64], v: &[f64], from: f64) -> f64 {
    let (xs, ys): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(v)
        .filter(|(ti, _)| **ti >= from)
        .map(|(ti, vi)| (*ti, vi.max(f64::MIN_POSITIVE).ln()))
        .unzip();
    if xs.len() < 2 {
        return 0.0;
    }
    least_squares_slope(&xs, &ys)
}

fn max_from(t: &[f64], v: &[f64], from: f64) -> f64 {
    t.iter().zip(v).filter(|(ti, _)| **ti >= from).map(|(_, vi)| *vi).fold(0.0, f64::max)
}

struct BallRun {
    series: TimeSeries,
    envelope_excess: f64,
    absorbing_time: f64,
    entry: f64,
}

/// Energy envelope `|u(t)| <= e^{-gamma t}|g| + (|f|/gamma)(1 - e^{-gamma t})`
/// at every step and entry into the ball `|u| <= 2|f|/gamma`.
pub fn run_absorbing_ball(
    gs: &[SpectralField],
    f: &SpectralField,
    p: &PhysicalParams,
    t_final: f64,
    cfg: &StepperConfig,
) -> Result<ExperimentReport> {
    check_inputs(gs, f, cfg)?;
    let gamma = p.gamma();
    if !(gamma > 0.0) {
        return Err(Error::Precondition("the absorbing ball needs gamma > 0".into()));
    }
    if f.is_zero() {
        return Err(Error::Precondition("the absorbing ball needs nonzero forcing".into()));
    }
    let n = step_total(t_final, cfg)?;
    let stride = n.div_ceil(RECORDED_SAMPLES).max(1);
    let norm_f = f.l2_norm();
    let radius = 2.0 * norm_f / gamma;

    let runs: Vec<BallRun> = gs
        .par_iter()
        .enumerate()
        .map(|(i, g)| -> Result<BallRun> {
            let norm_g = g.l2_norm();
            let envelope = |t: f64| (-gamma * t).exp() * norm_g + norm_f / gamma * (1.0 - (-gamma * t).exp());
            let mut series = TimeSeries::new(format!("member_{i}"), &["norm", "envelope"]);
            let mut excess = f64::NEG_INFINITY;
            // last time the trajectory was outside the ball
            let mut outside = None;
            evolve_observed(g, f, 0.0, t_final, cfg, p, |j, t, u| {
                let norm = u.l2_norm();
                let env = envelope(t);
                excess = excess.max(norm - env);
                if norm > radius + ENVELOPE_SLACK {
                    outside = Some(t);
                }
                if j % stride == 0 || j == n {
                    series.push(t, &[norm, env]);
                }
            })?;
            let entry = match outside {
                None => 0.0,
                Some(t) if t + cfg.dt <= t_final * (1.0 + 1e-12) => t + cfg.dt,
                Some(_) => f64::INFINITY,
            };
            Ok(BallRun {
                series,
                envelope_excess: excess,
                absorbing_time: absorbing_time(norm_g, norm_f, gamma)?,
                entry,
            })
        })
        .collect::<Result<_>>()?;

    let worst_excess = runs.iter().map(|r| r.envelope_excess).fold(f64::NEG_INFINITY, f64::max);
    let entry_lag = runs
        .iter()
        .map(|r| r.entry - r.absorbing_time)
        .fold(f64::NEG_INFINITY, f64::max);
    let latest_absorbing = runs.iter().map(|r| r.absorbing_time).fold(0.0, f64::max);
    let latest_entry = runs.iter().map(|r| r.entry).fold(0.0, f64::max);
    let assertions = vec![
        Assertion::at_most(
            "envelope",
            worst_excess,
            ENVELOPE_SLACK,
            "largest |u(t)| minus the energy envelope over all steps and members",
        ),
        Assertion::at_most(
            "entry_by_absorbing_time",
            entry_lag,
            cfg.dt,
            "largest (ball entry - analytic absorbing time) over members",
        ),
        Assertion::at_most(
            "ensemble_inside_ball",
            latest_entry,
            latest_absorbing + BALL_GRACE,
            "latest ball entry against the latest absorbing time plus one",
        ),
    ];
    let mut summary = BTreeMap::new();
    summary.insert("ball_radius".into(), radius);
    summary.insert("max_envelope_excess".into(), worst_excess);
    summary.insert("latest_absorbing_time".into(), latest_absorbing);
    summary.insert("latest_entry".into(), latest_entry);
    Ok(ExperimentReport {
        name: "absorbing".into(),
        params: *p,
        inputs: InputSummary::new(gs, f),
        series: runs.into_iter().map(|r| r.series).collect(),
        assertions,
        summary,
        provenance: provenance(cfg, t_final, stride),
    })
}

/// Tracks the nonlinear part `N(t) = u(t) - e^{-gamma t} e^{Lt} g` in `H^2`.
/// The plateau is the largest `|N|_{H^2}` over `[T/2, T]`; the transient peak
/// over the whole run is reported but not asserted.
pub fn run_smoothing(
    g: &SpectralField,
    f: &SpectralField,
    p: &PhysicalParams,
    t_final: f64,
    cfg: &StepperConfig,
) -> Result<ExperimentReport> {
    check_inputs(std::slice::from_ref(g), f, cfg)?;
    let n = step_total(t_final, cfg)?;
    let stride = n.div_ceil(RECORDED_SAMPLES).max(1);
    let g_h2 = g.sobolev_norm(2.0);
    let mut series = TimeSeries::new("trajectory", &["nonlinear_h2", "u_h2", "linear_h2", "linear_h2_closed_form"]);
    let mut linear_err = 0.0f64;
    evolve_observed(g, f, 0.0, t_final, cfg, p, |j, t, u| {
        if j % stride == 0 || j == n {
            let lin = linear_propagate(g, t, p, true);
            let closed = (-p.gamma() * t).exp() * g_h2;
            let lin_h2 = lin.sobolev_norm(2.0);
            linear_err = linear_err.max((lin_h2 - closed).abs() / g_h2.max(f64::MIN_POSITIVE));
            series.push(t, &[u.sub(&lin).sobolev_norm(2.0), u.sobolev_norm(2.0), lin_h2, closed]);
        }
    })?;
    let nl = series.column("nonlinear_h2").unwrap();
    let half = t_final / 2.0;
    let slope = final_log_slope(&series.t, nl, half);
    let plateau = max_from(&series.t, nl, half);
    let peak = nl.iter().copied().fold(0.0, f64::max);
    let roughness = g_h2 / g.l2_norm().max(f64::MIN_POSITIVE);
    let assertions = vec![
        Assertion::above("rough_data", roughness, ROUGHNESS_MIN, "|g|_{H^2} / |g|"),
        Assertion::at_most(
            "plateau_slope",
            slope,
            PLATEAU_SLOPE_MAX,
            "least-squares slope of ln |N|_{H^2} over [T/2, T]",
        ),
        Assertion::above(
            "contrast",
            g_h2 / plateau.max(f64::MIN_POSITIVE),
            CONTRAST_MIN,
            "|g|_{H^2} / max |N|_{H^2} over [T/2, T]",
        ),
        Assertion::at_most(
            "linear_part_decay",
            linear_err,
            1e-12,
            "relative gap between |e^{-gamma t} e^{Lt} g|_{H^2} and e^{-gamma t} |g|_{H^2}",
        ),
    ];
    let mut summary = BTreeMap::new();
    summary.insert("g_h2".into(), g_h2);
    summary.insert("roughness".into(), roughness);
    summary.insert("plateau".into(), plateau);
    summary.insert("transient_peak".into(), peak);
    summary.insert("final_slope".into(), slope);
    Ok(ExperimentReport {
        name: "smoothing".into(),
        params: *p,
        inputs: InputSummary::new(std::slice::from_ref(g), f),
        series: vec![series],
        assertions,
        summary,
        provenance: provenance(cfg, t_final, stride),
    })
}

struct AttractorRun {
    series: TimeSeries,
    start: f64,
    stabilized: f64,
    peak: f64,
    slope: f64,
    linear_err: f64,
    entry_lag: f64,
}

/// Ensemble approach to the attractor. For every member the radius
/// `|u(t) - e^{-gamma(t - T0)} e^{L(t - T0)} u(T0)|_{H^2}` is tracked from the
/// absorbing time `T0` (or `T/2` without forcing). The stabilized radius is
/// its maximum over `[T/2, T]`.
pub fn run_attractor_ensemble(
    gs: &[SpectralField],
    f: &SpectralField,
    p: &PhysicalParams,
    t_final: f64,
    cfg: &StepperConfig,
) -> Result<ExperimentReport> {
    check_inputs(gs, f, cfg)?;
    let gamma = p.gamma();
    if !(gamma > 0.0) {
        return Err(Error::Precondition("the attractor experiment needs gamma > 0".into()));
    }
    let n = step_total(t_final, cfg)?;
    let stride = n.div_ceil(RECORDED_SAMPLES).max(1);
    let half = t_final / 2.0;
    let norm_f = f.l2_norm();
    let forced = !f.is_zero();

    let runs: Vec<AttractorRun> = gs
        .par_iter()
        .enumerate()
        .map(|(i, g)| -> Result<AttractorRun> {
            let norm_g = g.l2_norm();
            let t0 = if forced { absorbing_time(norm_g, norm_f, gamma)? } else { half };
            if t0 > half {
                return Err(Error::Precondition(format!(
                    "member {i}: absorbing time {t0} is past T/2 = {half}; lengthen the run"
                )));
            }
            let radius_ball = 2.0 * norm_f / gamma;
            let mut series = TimeSeries::new(format!("member_{i}"), &["norm", "linear_norm", "radius_h2"]);
            let mut anchor: Option<(f64, SpectralField)> = None;
            let mut linear_err = 0.0f64;
            let mut outside = None;
            evolve_observed(g, f, 0.0, t_final, cfg, p, |j, t, u| {
                let norm = u.l2_norm();
                if forced && norm > radius_ball + ENVELOPE_SLACK {
                    outside = Some(t);
                }
                if anchor.is_none() && t >= t0 {
                    anchor = Some((t, u.clone()));
                }
                if j % stride == 0 || j == n {
                    let lin = linear_propagate(g, t, p, true).l2_norm();
                    let closed = (-gamma * t).exp() * norm_g;
                    linear_err = linear_err.max((lin - closed).abs() / norm_g.max(f64::MIN_POSITIVE));
                    let radius = match &anchor {
                        Some((ta, ua)) => u.sub(&linear_propagate(ua, t - ta, p, true)).sobolev_norm(2.0),
                        None => f64::NAN,
                    };
                    series.push(t, &[norm, lin, radius]);
                }
            })?;
            let start = anchor.map(|a| a.0).unwrap_or(t_final);
            let radius = series.column("radius_h2").unwrap();
            let entry = outside.map_or(0.0, |t| t + cfg.dt);
            Ok(AttractorRun {
                stabilized: max_from(&series.t, radius, half),
                peak: max_from(&series.t, radius, start),
                slope: final_log_slope(&series.t, radius, half),
                start,
                linear_err,
                entry_lag: if forced { entry - t0 } else { 0.0 },
                series,
            })
        })
        .collect::<Result<_>>()?;

    let stabilized: Vec<f64> = runs.iter().map(|r| r.stabilized).collect();
    let hi = stabilized.iter().copied().fold(0.0, f64::max);
    let lo = stabilized.iter().copied().fold(f64::INFINITY, f64::min);
    let worst_slope = runs.iter().map(|r| r.slope).fold(f64::NEG_INFINITY, f64::max);
    let mut assertions = vec![
        Assertion::at_most(
            "radius_stabilizes",
            worst_slope,
            PLATEAU_SLOPE_MAX,
            "largest final-half log-slope of the H^2 radius over members",
        ),
        Assertion::at_most(
            "linear_part_decay",
            runs.iter().map(|r| r.linear_err).fold(0.0, f64::max),
            1e-12,
            "relative gap between |e^{(-gamma + L)t} g| and e^{-gamma t}|g|",
        ),
    ];
    if forced {
        assertions.push(Assertion::at_most(
            "entry_by_absorbing_time",
            runs.iter().map(|r| r.entry_lag).fold(f64::NEG_INFINITY, f64::max),
            cfg.dt,
            "largest (ball entry - absorbing time) over members",
        ));
        assertions.push(Assertion::at_most(
            "radius_independent_of_data",
            if hi > 0.0 { (hi - lo) / hi } else { 0.0 },
            RADIUS_AGREEMENT,
            "(max - min) / max of the stabilized H^2 radii",
        ));
    } else {
        assertions.push(Assertion::at_most(
            "radius_vanishes",
            hi,
            ZERO_FORCING_RADIUS,
            "largest stabilized H^2 radius without forcing",
        ));
    }
    let mut summary = BTreeMap::new();
    summary.insert("radius_max".into(), hi);
    summary.insert("radius_min".into(), if lo.is_finite() { lo } else { 0.0 });
    summary.insert("transient_peak".into(), runs.iter().map(|r| r.peak).fold(0.0, f64::max));
    summary.insert("latest_anchor".into(), runs.iter().map(|r| r.start).fold(0.0, f64::max));
    for (i, r) in stabilized.iter().enumerate() {
        summary.insert(format!("radius_member_{i}"), *r);
    }
    Ok(ExperimentReport {
        name: "attractor".into(),
        params: *p,
        inputs: InputSummary::new(gs, f),
        series: runs.into_iter().map(|r| r.series).collect(),
        assertions,
        summary,
        provenance: provenance(cfg, t_final, stride),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exponential() {
        let t: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let v: Vec<f64> = t.iter().map(|x| (-0.3 * x).exp()).collect();
        assert!((final_log_slope(&t, &v, 5.0) + 0.3).abs() < 1e-12);
        assert_eq!(final_log_slope(&t, &v, 100.0), 0.0);
    }

    #[test]
    fn rejects_unforced_ball() {
        let p = PhysicalParams::new(1.0, 0.0, 1.0).unwrap();
        let cfg = StepperConfig::new(0.01, 4).unwrap();
        let z = SpectralField::zeros(4);
        assert!(matches!(run_absorbing_ball(&[z.clone()], &z, &p, 1.0, &cfg), Err(Error::Precondition(_))));
    }
}
