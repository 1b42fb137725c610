use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stepper::Nonlinearity;
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::spectral::{NonlinearKernel, SpectralField};

/// Fewest Simpson panels accepted on `[0, delta]`.
pub const MIN_QUAD_NODES: usize = 64;

/// Growth factor over `max(|g|, delta |f|)` treated as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    pub iters: usize,
    pub quad_nodes: usize,
    #[serde(default)]
    pub nonlinearity: Nonlinearity,
}

impl PicardConfig {
    pub fn new(iters: usize, quad_nodes: usize) -> Self {
        PicardConfig {
            iters,
            quad_nodes,
            nonlinearity: Nonlinearity::Full,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PicardSolution {
    /// Final iterate at `t = delta`.
    pub state: SpectralField,
    /// `max_t |Phi^{n+1} - Phi^n|` in L^2, one entry per iterate.
    pub contraction: Vec<f64>,
    pub nodes: Vec<f64>,
    /// Final iterate on every node.
    pub states: Vec<SpectralField>,
}

/// `iters` Picard iterates of the Duhamel map on `[0, delta]`, starting from
/// the free evolution `e^{Lt} g`.
pub fn picard_solve(
    g: &SpectralField,
    f: &SpectralField,
    delta: f64,
    iters: usize,
    quad_nodes: usize,
    p: &PhysicalParams,
) -> Result<SpectralField> {
    Ok(picard_solve_with(g, f, delta, &PicardConfig::new(iters, quad_nodes), p)?.state)
}

/// Works in the interaction frame `W(t) = e^{-Lt} u(t)`, where the integrand
/// `e^{-Ls}(N(u) - gamma u)` is accumulated by composite Simpson. Midpoint
/// values of `W` come from 4-point Lagrange interpolation of the node values.
/// The forcing integral is exact.
pub fn picard_solve_with(
    g: &SpectralField,
    f: &SpectralField,
    delta: f64,
    cfg: &PicardConfig,
    p: &PhysicalParams,
) -> Result<PicardSolution> {
    if g.kmax() != f.kmax() {
        return Err(Error::InvalidParams("data and forcing kmax differ".into()));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParams(format!("delta must be positive, got {delta}")));
    }
    if cfg.iters == 0 {
        return Err(Error::InvalidParams("at least one Picard iterate is required".into()));
    }
    if cfg.quad_nodes < MIN_QUAD_NODES {
        return Err(Error::InvalidParams(format!(
            "quad_nodes must be at least {MIN_QUAD_NODES}, got {}",
            cfg.quad_nodes
        )));
    }
    let kmax = g.kmax();
    let m = cfg.quad_nodes;
    let h = delta / m as f64;
    let gamma = p.gamma();
    let phases: Vec<f64> = (1..=kmax as i64).map(|k| p.phase(k)).collect();
    let nodes: Vec<f64> = (0..=m).map(|j| j as f64 * h).collect();
    let kernel = NonlinearKernel::new(kmax);
    let threshold = DIVERGENCE_FACTOR * g.l2_norm().max(delta * f.l2_norm());

    // e^{-i phase t} and back
    let to_u = |w: &[Complex64], t: f64| -> Vec<Complex64> {
        w.iter().zip(&phases).map(|(c, ph)| c * Complex64::from_polar(1.0, -ph * t)).collect()
    };
    let integrand = |w: &[Complex64], t: f64| -> Vec<Complex64> {
        let u = to_u(w, t);
        let mut r: Vec<Complex64> = match cfg.nonlinearity {
            Nonlinearity::Full => kernel.apply(&u),
            Nonlinearity::Disabled => vec![Complex64::new(0.0, 0.0); kmax],
        };
        for ((ri, ui), ph) in r.iter_mut().zip(&u).zip(&phases) {
            *ri = (*ri - gamma * ui) * Complex64::from_polar(1.0, ph * t);
        }
        r
    };
    let forcing: Vec<Vec<Complex64>> = nodes
        .iter()
        .map(|&t| {
            f.coeffs()
                .iter()
                .zip(&phases)
                .map(|(fk, &ph)| {
                    if ph == 0.0 {
                        fk * t
                    } else {
                        fk * (Complex64::from_polar(1.0, ph * t) - 1.0) / Complex64::new(0.0, ph)
                    }
                })
                .collect()
        })
        .collect();

    let mut w: Vec<Vec<Complex64>> = vec![g.coeffs().to_vec(); m + 1];
    let mut contraction = Vec::with_capacity(cfg.iters);
    for iteration in 1..=cfg.iters {
        let at_nodes: Vec<Vec<Complex64>> = (0..=m).into_par_iter().map(|j| integrand(&w[j], nodes[j])).collect();
        let at_mid: Vec<Vec<Complex64>> = (0..m)
            .into_par_iter()
            .map(|i| {
                let (base, wts) = midpoint_stencil(i, m);
                let wm: Vec<Complex64> = (0..kmax)
                    .map(|k| (0..4).map(|s| wts[s] * w[base + s][k]).sum())
                    .collect();
                integrand(&wm, nodes[i] + 0.5 * h)
            })
            .collect();

        let mut next = Vec::with_capacity(m + 1);
        let mut acc = vec![Complex64::new(0.0, 0.0); kmax];
        let mut diff = 0.0f64;
        let mut peak = 0.0f64;
        for j in 0..=m {
            if j > 0 {
                for k in 0..kmax {
                    acc[k] += h / 6.0 * (at_nodes[j - 1][k] + 4.0 * at_mid[j - 1][k] + at_nodes[j][k]);
                }
            }
            let wj: Vec<Complex64> = (0..kmax).map(|k| g.coeffs()[k] + acc[k] + forcing[j][k]).collect();
            // L2 norms are frame independent
            let d: f64 = wj.iter().zip(&w[j]).map(|(a, b)| (a - b).norm_sqr()).sum();
            let n: f64 = wj.iter().map(|a| a.norm_sqr()).sum();
            diff = diff.max((2.0 * d).sqrt());
            peak = peak.max((2.0 * n).sqrt());
            next.push(wj);
        }
        if !(peak <= threshold) && !(peak == 0.0) {
            return Err(Error::PicardDivergence {
                iteration,
                norm: peak,
                threshold,
            });
        }
        contraction.push(diff);
        w = next;
    }

    let states: Vec<SpectralField> = w
        .iter()
        .zip(&nodes)
        .map(|(wj, &t)| SpectralField::from_raw(to_u(wj, t)))
        .collect();
    Ok(PicardSolution {
        state: states[m].clone(),
        contraction,
        nodes,
        states,
    })
}

/// First stencil node and cubic Lagrange weights for the midpoint of panel
/// `i` out of `m`.
fn midpoint_stencil(i: usize, m: usize) -> (usize, [f64; 4]) {
    if i == 0 {
        (0, [5.0 / 16.0, 15.0 / 16.0, -5.0 / 16.0, 1.0 / 16.0])
    } else if i == m - 1 {
        (m - 3, [1.0 / 16.0, -5.0 / 16.0, 15.0 / 16.0, 5.0 / 16.0])
    } else {
        (i - 1, [-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random_field;

    #[test]
    fn zero_data_stays_zero() {
        let p = PhysicalParams::new(1.0, 0.0, 1.0).unwrap();
        let z = SpectralField::zeros(8);
        let sol = picard_solve_with(&z, &z, 0.1, &PicardConfig::new(3, 64), &p).unwrap();
        assert!(sol.state.is_zero());
        assert_eq!(sol.contraction, vec![0.0; 3]);
    }

    #[test]
    fn first_linear_iterate_closed_form() {
        let p = PhysicalParams::new(1.0, 0.4, 0.8).unwrap();
        let g = random_field(6, 1.0, 0.5, 3);
        let f = random_field(6, 2.0, 0.2, 4);
        let delta = 0.05;
        let cfg = PicardConfig {
            iters: 1,
            quad_nodes: 64,
            nonlinearity: Nonlinearity::Disabled,
        };
        let u = picard_solve_with(&g, &f, delta, &cfg, &p).unwrap().state;
        for k in 1..=6i64 {
            let ph = p.phase(k);
            let e = Complex64::from_polar(1.0, -ph * delta);
            let expect = e * g.coeff(k) * (1.0 - p.gamma() * delta)
                + f.coeff(k) * (1.0 - e) / Complex64::new(0.0, ph);
            assert!((u.coeff(k) - expect).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn rejects_coarse_quadrature() {
        let p = PhysicalParams::new(1.0, 0.0, 1.0).unwrap();
        let z = SpectralField::zeros(2);
        assert!(picard_solve(&z, &z, 0.1, 1, 16, &p).is_err());
    }

    #[test]
    fn reports_divergence() {
        let p = PhysicalParams::new(1.0, 0.0, 0.0).unwrap();
        let g = random_field(16, 0.0, 50.0, 1);
        let err = picard_solve(&g, &SpectralField::zeros(16), 5.0, 30, 64, &p).unwrap_err();
        assert!(matches!(err, Error::PicardDivergence { .. }), "{err}");
    }
}
