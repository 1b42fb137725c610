//! Small summaries shared by the empirical scans and experiments.

use serde::{Deserialize, Serialize};

/// Summary of a sample of ratios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q95: f64,
    /// Index of the maximizing sample.
    pub argmax: usize,
}

impl RatioStats {
    /// Returns `None` for an empty sample. NaN entries sort last.
    pub fn from_samples(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q = |p: f64| {
            // linear interpolation between order statistics
            let x = p * (sorted.len() - 1) as f64;
            let lo = x.floor() as usize;
            let hi = x.ceil() as usize;
            sorted[lo] + (x - lo as f64) * (sorted[hi] - sorted[lo])
        };
        let argmax = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        Some(RatioStats {
            count: values.len(),
            min: sorted[0],
            max: values[argmax],
            mean: values.iter().sum::<f64>() / values.len() as f64,
            q25: q(0.25),
            median: q(0.5),
            q75: q(0.75),
            q95: q(0.95),
            argmax,
        })
    }

    pub fn all_finite(&self) -> bool {
        self.min.is_finite() && self.max.is_finite() && self.mean.is_finite()
    }
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
