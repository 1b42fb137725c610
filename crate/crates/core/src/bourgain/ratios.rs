use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::norms::{xsb_norm, LineSpectrum};
use super::sample::SpaceTimeSample;
use crate::error::{Error, Result};
use crate::params::{ExactParams, PhysicalParams};
use crate::spectral::{default_grid, to_physical, SpectralField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Modulation exponent of the bilinear and `L^4` denominators.
pub const DENOMINATOR_B: f64 = 0.3;

/// Largest time grid the `L^6` grid route will build.
pub const MAX_L6_TIME_GRID: usize = 1 << 22;

/// Line spectrum of `d/dx (u1 u2)` over every output mode `1..=2 kmax`.
///
/// Each factor is a trigonometric polynomial in time in its modulation frame,
/// so a product term `k1 + k2 = k` carries lines at `sigma1 + sigma2 + w` with
/// `w = phase(k) - phase(k1) - phase(k2)`. The `sigma` sums are a linear
/// convolution; lines from different pairs are merged when their positions
/// agree to rounding. Nothing is truncated or aliased.
pub fn derivative_product_spectrum(
    u1: &SpaceTimeSample,
    u2: &SpaceTimeSample,
    p: &PhysicalParams,
) -> Result<LineSpectrum> {
    if u1.kmax() != u2.kmax() || u1.nt() != u2.nt() || u1.period() != u2.period() {
        return Err(Error::InvalidParams("product factors live on different grids".into()));
    }
    let kmax = u1.kmax() as i64;
    let nt = u1.nt();
    let lo = u1.m_lo();
    let len = (2 * nt).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let unit = 2.0 * PI / u1.period();

    // padded transforms of a_{k}(m), m = lo..lo+nt, for signed k
    let transform = |spec: Vec<Vec<Complex64>>| -> HashMap<i64, Vec<Complex64>> {
        let mut out = HashMap::new();
        for (i, row) in spec.into_iter().enumerate() {
            let k = i as i64 + 1;
            // a_{-k}(m) = conj(a_k(-m)); index m - lo
            let mirrored: Vec<Complex64> = (0..nt as i64)
                .map(|idx| {
                    let m = idx + lo;
                    let src = -m - lo;
                    if (0..nt as i64).contains(&src) {
                        row[src as usize].conj()
                    } else {
                        ZERO
                    }
                })
                .collect();
            for (key, seq) in [(k, row), (-k, mirrored)] {
                let mut buf = seq;
                buf.resize(len, ZERO);
                fwd.process(&mut buf);
                out.insert(key, buf);
            }
        }
        out
    };
    let a = transform(u1.modulation_spectrum(p));
    let b = transform(u2.modulation_spectrum(p));

    let modes: Vec<Vec<(f64, Complex64)>> = (1..=2 * kmax)
        .into_par_iter()
        .map(|k| {
            let mut terms: Vec<(f64, Vec<Complex64>)> = Vec::new();
            for k1 in (k - kmax).max(-kmax)..=kmax {
                let k2 = k - k1;
                if k1 == 0 || k2 == 0 || k2.abs() > kmax {
                    continue;
                }
                let w = p.phase(k) - p.phase(k1.min(k2)) - p.phase(k1.max(k2));
                let mut buf: Vec<Complex64> = a[&k1].iter().zip(&b[&k2]).map(|(x, y)| x * y).collect();
                inv.process(&mut buf);
                let scale = 1.0 / len as f64;
                buf.truncate(2 * nt - 1);
                buf.iter_mut().for_each(|c| *c *= scale);
                terms.push((w, buf));
            }
            let dk = Complex64::new(0.0, k as f64);
            merge_lines(terms, unit, 2 * lo)
                .into_iter()
                .map(|(sig, c)| (sig, dk * c))
                .collect()
        })
        .collect();
    Ok(LineSpectrum {
        period: u1.period(),
        modes,
    })
}

/// Merges shifted convolutions `(w, seq)` into lines at `w + unit * (m0 + i)`.
fn merge_lines(terms: Vec<(f64, Vec<Complex64>)>, unit: f64, m0: i64) -> Vec<(f64, Complex64)> {
    // split w = n * unit + r with r in [0, unit)
    let mut split: Vec<(f64, i64, f64, Vec<Complex64>)> = terms
        .into_iter()
        .map(|(w, seq)| {
            let n = (w / unit).floor();
            (w - n * unit, n as i64, w, seq)
        })
        .collect();
    split.sort_by(|x, y| x.0.total_cmp(&y.0));
    let wmax = split.iter().map(|t| t.2.abs()).fold(0.0, f64::max);
    let tol = 1e-9 * unit + 1e-13 * wmax;
    let mut clusters: Vec<(f64, Vec<(i64, Vec<Complex64>)>)> = Vec::new();
    for (r, n, _, seq) in split {
        match clusters.last_mut() {
            Some((r0, members)) if r - *r0 <= tol => members.push((n, seq)),
            _ => clusters.push((r, vec![(n, seq)])),
        }
    }
    if clusters.len() > 1 {
        let (r_first, r_last) = (clusters[0].0, clusters[clusters.len() - 1].0);
        if r_first + unit - r_last <= tol {
            let (_, last) = clusters.pop().unwrap();
            clusters[0].1.extend(last.into_iter().map(|(n, seq)| (n + 1, seq)));
        }
    }
    let mut out = Vec::new();
    for (r, members) in clusters {
        let nmin = members.iter().map(|m| m.0).min().unwrap();
        let nmax = members.iter().map(|m| m.0).max().unwrap();
        let width = members[0].1.len();
        let mut acc = vec![ZERO; width + (nmax - nmin) as usize];
        for (n, seq) in members {
            let off = (n - nmin) as usize;
            for (i, c) in seq.into_iter().enumerate() {
                acc[off + i] += c;
            }
        }
        for (i, c) in acc.into_iter().enumerate() {
            if c != ZERO {
                out.push((r + unit * (nmin + m0 + i as i64) as f64, c));
            }
        }
    }
    out
}

/// `||d/dx (u1 u2)||_{Z^s} / (||u1||_{X^{s,3/10}} ||u2||_{X^{s,3/10}})`.
pub fn bilinear_ratio(u1: &SpaceTimeSample, u2: &SpaceTimeSample, s: f64, p: &PhysicalParams) -> Result<f64> {
    let den = xsb_norm(u1, s, DENOMINATOR_B, p) * xsb_norm(u2, s, DENOMINATOR_B, p);
    if den == 0.0 {
        return Err(Error::ZeroDenominator("a bilinear factor vanishes".into()));
    }
    Ok(derivative_product_spectrum(u1, u2, p)?.zs(s) / den)
}

/// `||chi_[0, delta) u||_{L^4_{x,t}} / ||u||_{X^{0,3/10}}` with the windowed
/// sample evaluated on an alias-free physical grid and the sample times in
/// `[0, delta)`.
pub fn l4_ratio(u: &SpaceTimeSample, delta: f64, p: &PhysicalParams) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParams(format!("delta must be positive, got {delta}")));
    }
    let den = xsb_norm(u, 0.0, DENOMINATOR_B, p);
    if den == 0.0 {
        return Err(Error::ZeroDenominator("sample vanishes".into()));
    }
    let kmax = u.kmax();
    let nx = default_grid(kmax);
    let w = u.windowed();
    let mut quartic = 0.0;
    for j in 0..u.nt() {
        if u.time(j) >= delta {
            break;
        }
        let field = SpectralField::from_raw(w.iter().map(|row| row[j]).collect());
        quartic += to_physical(&field, nx)?.iter().map(|v| v.powi(4)).sum::<f64>();
    }
    let num = (quartic * (2.0 * PI / nx as f64) * u.dt()).powf(0.25);
    Ok(num / den)
}

/// `||e^{Lt} h||_{L^6}` over `x in [0, 2 pi)` and `t in [0, span)`, undamped,
/// through the identity `int |u|^6 = 2 pi span sum_{p,q} |sum u_{k1} u_{k2} u_{k3}|^2`
/// where the inner sum runs over triples with `k1 + k2 + k3 = p` and cubic
/// phase `q`. Exact when `span` is a whole number of periods of the flow.
pub fn l6_norm_exact(h: &SpectralField, span: f64, p: &PhysicalParams) -> Result<f64> {
    let e = ExactParams::from_params(p)?;
    let flow_period = 2.0 * PI * e.scale as f64;
    let periods = span / flow_period;
    if !(periods >= 1.0 && (periods - periods.round()).abs() < 1e-9 * periods) {
        return Err(Error::Precondition(format!(
            "span {span} is not a whole number of flow periods {flow_period}"
        )));
    }
    let kmax = h.kmax() as i64;
    let ks: Vec<i64> = (1..=kmax).flat_map(|k| [-k, k]).collect();
    let mut phase_scaled: HashMap<i64, i128> = HashMap::new();
    for &k in &ks {
        let k = k as i128;
        phase_scaled.insert(k as i64, e.alpha_scaled * k.pow(5) - e.beta_scaled * k.pow(3));
    }
    let groups = ks
        .par_iter()
        .map(|&k1| {
            let mut local: HashMap<(i64, i128), Complex64> = HashMap::new();
            let c1 = h.coeff(k1);
            for &k2 in &ks {
                let c12 = c1 * h.coeff(k2);
                let q12 = phase_scaled[&k1] + phase_scaled[&k2];
                for &k3 in &ks {
                    *local.entry((k1 + k2 + k3, -(q12 + phase_scaled[&k3]))).or_insert(ZERO) += c12 * h.coeff(k3);
                }
            }
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (key, v) in b {
                *a.entry(key).or_insert(ZERO) += v;
            }
            a
        });
    let sum: f64 = groups.values().map(|c| c.norm_sqr()).sum();
    Ok((2.0 * PI * span * sum).powf(1.0 / 6.0))
}

/// Rectangle-rule `L^6` norm of `e^{Lt} h` on an `nx` by `nt` grid over
/// `[0, 2 pi) x [0, span)`.
pub fn l6_norm_grid(h: &SpectralField, span: f64, nx: usize, nt: usize, p: &PhysicalParams) -> Result<f64> {
    if nt == 0 || nt > MAX_L6_TIME_GRID {
        return Err(Error::InvalidParams(format!("time grid {nt} outside 1..={MAX_L6_TIME_GRID}")));
    }
    let dt = span / nt as f64;
    let sum: f64 = (0..nt)
        .into_par_iter()
        .map(|j| -> Result<f64> {
            let u = crate::evolution::linear_propagate(h, j as f64 * dt, p, false);
            Ok(to_physical(&u, nx)?.iter().map(|v| v.powi(6)).sum())
        })
        .sum::<Result<f64>>()?;
    Ok((sum * 2.0 * PI / nx as f64 * dt).powf(1.0 / 6.0))
}

/// `||e^{Lt} h||_{L^6(T^2)} / ||h||_{H^eps}`. Uses the exact route when the
/// parameters are rational and `span` covers whole periods of the flow,
/// otherwise a grid that resolves every frequency of `|u|^6`.
pub fn l6_ratio(h: &SpectralField, eps: f64, span: f64, p: &PhysicalParams) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParams(format!("eps must be positive, got {eps}")));
    }
    if !(span > 0.0 && span.is_finite()) {
        return Err(Error::InvalidParams(format!("span must be positive, got {span}")));
    }
    let den = h.sobolev_norm(eps);
    if den == 0.0 {
        return Err(Error::ZeroDenominator("h vanishes".into()));
    }
    let num = match l6_norm_exact(h, span, p) {
        Ok(v) => v,
        Err(Error::NoExactKey { .. }) | Err(Error::Precondition(_)) => {
            let kmax = h.kmax();
            let top = (1..=kmax as i64).map(|k| p.phase(k).abs()).fold(0.0, f64::max);
            let nt = (6.0 * top * span / PI).ceil() as usize + 64;
            l6_norm_grid(h, span, (6 * kmax + 2).next_power_of_two(), nt, p)?
        }
        Err(other) => return Err(other),
    };
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::super::sample::Window;
    use super::*;
    use crate::spectral::random_field;

    fn p10() -> PhysicalParams {
        PhysicalParams::new(1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn cosine_l6() {
        let h = SpectralField::from_fn(3, |k| if k == 1 { Complex64::new(1.0, 0.0) } else { ZERO }).unwrap();
        let span = 2.0 * PI;
        let v = l6_norm_exact(&h, span, &p10()).unwrap();
        assert!((v.powi(6) - 40.0 * PI * span).abs() < 1e-10 * v.powi(6));
    }

    #[test]
    fn exact_and_grid_agree() {
        let p = PhysicalParams::new(1.0, 1.0, 1.0).unwrap();
        let h = random_field(3, 0.5, 0.7, 4);
        let a = l6_norm_exact(&h, 2.0 * PI, &p).unwrap();
        let b = l6_norm_grid(&h, 2.0 * PI, 32, 4096, &p).unwrap();
        assert!((a - b).abs() < 1e-10 * a, "{a} {b}");
    }

    #[test]
    fn zero_denominators() {
        let p = p10();
        let z = SpectralField::zeros(4);
        assert!(matches!(l6_ratio(&z, 0.1, 2.0 * PI, &p), Err(Error::ZeroDenominator(_))));
        let w = Window::tukey(0.0, 1.0);
        let u = SpaceTimeSample::characteristic(4, 2, Complex64::new(1.0, 0.0), 1.0, 32, w, &p).unwrap();
        let zero = u.scaled(0.0);
        assert!(matches!(bilinear_ratio(&u, &zero, 0.0, &p), Err(Error::ZeroDenominator(_))));
        assert!(matches!(l4_ratio(&zero, 0.5, &p), Err(Error::ZeroDenominator(_))));
    }

    #[test]
    fn merged_lines_keep_mass() {
        let unit = 1.0;
        let terms = vec![
            (2.0, vec![Complex64::new(1.0, 0.0); 3]),
            (3.0 + 1e-14, vec![Complex64::new(1.0, 0.0); 3]),
            (2.5, vec![Complex64::new(2.0, 0.0); 3]),
        ];
        let lines = merge_lines(terms, unit, 0);
        let total: Complex64 = lines.iter().map(|l| l.1).sum();
        assert_eq!(total, Complex64::new(12.0, 0.0));
        // lines at 2, 3, 4 and 3, 4, 5 share 3 and 4
        assert_eq!(lines.len(), 4 + 3);
    }
}
