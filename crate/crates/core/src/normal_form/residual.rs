use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::operators::{
    nonresonant_trilinear_fast, normal_form_bilinear, resonant_pair, resonant_self,
};
use crate::error::{Error, Result};
use crate::evolution::{linear_propagate, Trajectory};
use crate::params::PhysicalParams;
use crate::spectral::SpectralField;

/// Second argument of the forcing interaction `B(u, .)` inside the bilinear
/// Duhamel integral.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcingArgument {
    /// `B(u, f)`: what differentiating `B(u, u)` along the flow produces.
    #[default]
    Plain,
    /// `B(u, e^{gamma r - L r} f)`, evaluated exactly at every node.
    Propagated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuhamelOptions {
    #[serde(default)]
    pub forcing_argument: ForcingArgument,
    /// Use every `stride`-th trajectory sample as a quadrature node.
    #[serde(default = "one")]
    pub stride: usize,
    /// When false all normal-form operators are dropped and only the linear
    /// Duhamel identity remains.
    #[serde(default = "yes")]
    pub nonlinear: bool,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

impl Default for DuhamelOptions {
    fn default() -> Self {
        DuhamelOptions {
            forcing_argument: ForcingArgument::Plain,
            stride: 1,
            nonlinear: true,
        }
    }
}

pub const TERM_NAMES: [&str; 6] = [
    "linear_data",
    "bilinear_at_t",
    "bilinear_at_0",
    "bilinear_duhamel",
    "forcing_resonant_duhamel",
    "trilinear_duhamel",
];

#[derive(Clone, Debug, Serialize)]
pub struct DuhamelResidualReport {
    pub t: f64,
    pub per_mode_residual: Vec<f64>,
    pub residual: SpectralField,
    pub total_relative: f64,
    /// H^2 norm of each right-hand-side group, keyed by [`TERM_NAMES`].
    pub term_magnitudes: BTreeMap<String, f64>,
    pub quadrature_nodes: usize,
}

impl DuhamelResidualReport {
    pub const CSV_HEADER: &'static str =
        "t,total_relative,linear_data,bilinear_at_t,bilinear_at_0,bilinear_duhamel,forcing_resonant_duhamel,trilinear_duhamel";

    pub fn csv_row(&self) -> String {
        let mut row = format!("{:.16e},{:.16e}", self.t, self.total_relative);
        for name in TERM_NAMES {
            row.push_str(&format!(",{:.16e}", self.term_magnitudes[name]));
        }
        row
    }
}

/// Residual of the normal-form representation of `u(t)` with default options.
pub fn duhamel_residual(
    traj: &Trajectory,
    g: &SpectralField,
    f: &SpectralField,
    t: f64,
) -> Result<DuhamelResidualReport> {
    duhamel_residual_with(traj, g, f, t, &DuhamelOptions::default())
}

/// Compares `u(t)` against
///
/// ```text
/// e^{-gamma t} e^{Lt} g + B(u,u)(t) - e^{-gamma t} e^{Lt} B(g,g)
///   + int_0^t e^{-gamma(t-r)} e^{L(t-r)} [gamma B(u,u) - 2 B(u, f)] dr
///   + int_0^t e^{-gamma(t-r)} e^{L(t-r)} [f + rho(u) + sigma(u)] dr
///   + int_0^t e^{-gamma(t-r)} e^{L(t-r)} R(u) dr
/// ```
///
/// Time is measured from the first trajectory sample. Integrals use composite
/// Simpson on the stored samples after removing the propagator, with a
/// trapezoid final panel when the panel count is odd. The forcing integral is
/// exact.
pub fn duhamel_residual_with(
    traj: &Trajectory,
    g: &SpectralField,
    f: &SpectralField,
    t: f64,
    opts: &DuhamelOptions,
) -> Result<DuhamelResidualReport> {
    let p = *traj.params();
    let kmax = traj.kmax();
    if g.kmax() != kmax || f.kmax() != kmax {
        return Err(Error::InvalidParams("data, forcing and trajectory kmax differ".into()));
    }
    if opts.stride == 0 {
        return Err(Error::Precondition("quadrature stride must be positive".into()));
    }
    let jt = traj.index_of(t)?;
    if jt % opts.stride != 0 {
        return Err(Error::TimeOutOfRange {
            t,
            start: traj.start(),
            end: traj.end(),
        });
    }
    let n = jt / opts.stride;
    let h = traj.dt() * opts.stride as f64;
    let elapsed = n as f64 * h;
    let rates: Vec<Complex64> = (1..=kmax as i64)
        .map(|k| Complex64::new(p.gamma(), p.phase(k)))
        .collect();
    let back = |v: &[Complex64]| -> SpectralField {
        SpectralField::from_raw(
            v.iter()
                .zip(&rates)
                .map(|(c, a)| c * (-a * elapsed).exp())
                .collect(),
        )
    };

    let u_t = &traj.states()[jt];
    let linear = linear_propagate(g, elapsed, &p, true);
    let forcing_integral = SpectralField::from_raw(
        f.coeffs()
            .iter()
            .zip(&rates)
            .map(|(fk, a)| {
                if a.norm() == 0.0 {
                    fk * elapsed
                } else {
                    fk * (1.0 - (-a * elapsed).exp()) / a
                }
            })
            .collect(),
    );

    let zero = SpectralField::zeros(kmax);
    let (b_now, b_start, bil, res, tri) = if opts.nonlinear {
        let weights = simpson_weights(n, h);
        let nodes: Result<Vec<[Vec<Complex64>; 3]>> = (0..=n)
            .into_par_iter()
            .map(|i| integrands(&traj.states()[i * opts.stride], f, i as f64 * h, &p, opts.forcing_argument))
            .collect();
        let nodes = nodes?;
        let mut acc = [vec![Complex64::new(0.0, 0.0); kmax], vec![Complex64::new(0.0, 0.0); kmax], vec![Complex64::new(0.0, 0.0); kmax]];
        for (i, node) in nodes.iter().enumerate() {
            let r = i as f64 * h;
            for (slot, values) in acc.iter_mut().zip(node) {
                for k in 0..kmax {
                    slot[k] += weights[i] * (rates[k] * r).exp() * values[k];
                }
            }
        }
        let [a0, a1, a2] = acc;
        (
            normal_form_bilinear(u_t, u_t, &p)?,
            linear_propagate(&normal_form_bilinear(g, g, &p)?, elapsed, &p, true).scaled(-1.0),
            back(&a0),
            back(&a1).add(&forcing_integral),
            back(&a2),
        )
    } else {
        (zero.clone(), zero.clone(), zero.clone(), forcing_integral, zero)
    };

    let terms = [linear, b_now, b_start, bil, res, tri];
    let mut rhs = SpectralField::zeros(kmax);
    for term in &terms {
        rhs = rhs.add(term);
    }
    let residual = u_t.sub(&rhs);
    let term_magnitudes = TERM_NAMES
        .iter()
        .zip(&terms)
        .map(|(name, term)| (name.to_string(), term.sobolev_norm(2.0)))
        .collect();
    Ok(DuhamelResidualReport {
        t,
        per_mode_residual: residual.coeffs().iter().map(|c| c.norm()).collect(),
        total_relative: residual.l2_norm() / u_t.l2_norm().max(1e-30),
        residual,
        term_magnitudes,
        quadrature_nodes: n + 1,
    })
}

/// `[gamma B(u,u) - 2 B(u, F), rho(u) + sigma(u), R(u)]` at time `r`.
fn integrands(
    u: &SpectralField,
    f: &SpectralField,
    r: f64,
    p: &PhysicalParams,
    arg: ForcingArgument,
) -> Result<[Vec<Complex64>; 3]> {
    let forcing = match arg {
        ForcingArgument::Plain => f.clone(),
        ForcingArgument::Propagated => linear_propagate(f, -r, p, true),
    };
    let bil = normal_form_bilinear(u, u, p)?
        .scaled(p.gamma())
        .sub(&normal_form_bilinear(u, &forcing, p)?.scaled(2.0));
    let res = resonant_self(u, p)?.add(&resonant_pair(u, p)?);
    let tri = nonresonant_trilinear_fast(u, p)?;
    Ok([bil.into_coeffs(), res.into_coeffs(), tri.into_coeffs()])
}

/// Composite Simpson weights on `n` panels of width `h`; an odd final panel
/// falls back to the trapezoid rule.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    let even = n - n % 2;
    for i in (0..even).step_by(2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if n % 2 == 1 {
        w[n - 1] += h / 2.0;
        w[n] += h / 2.0;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_integrate_cubics() {
        let w = simpson_weights(8, 0.25);
        let s: f64 = w.iter().enumerate().map(|(i, wi)| wi * (i as f64 * 0.25).powi(3)).sum();
        assert!((s - 4.0).abs() < 1e-14);
        let w = simpson_weights(3, 1.0);
        assert_eq!(w, vec![1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0 + 0.5, 0.5]);
        assert_eq!(simpson_weights(0, 1.0), vec![0.0]);
    }
}
