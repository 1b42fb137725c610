use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::identities::kappa_scaled;
use crate::error::{Error, Result};
use crate::params::{ExactParams, PhysicalParams};

/// `(p, q)` with `q` stored as `scale * kappa`, an exact integer.
pub type PqKey = (i64, i128);

/// Triples `(k1, k2, k3)` with every `|k_i|` in a shell, grouped by their sum
/// `p` and cubic phase `q = kappa(k1, k2, k3)`.
#[derive(Clone, Debug)]
pub struct ResonanceTable {
    pub shell: (i64, i64),
    pub exact: ExactParams,
    pub entries: BTreeMap<PqKey, Vec<[i64; 3]>>,
    pub max_count: usize,
    pub argmax: Option<PqKey>,
    /// Largest count after discarding triples with a vanishing pairwise sum.
    pub nondegenerate_max_count: usize,
}

/// Signed shell members: `k` with `kmin <= |k| <= kmax`.
pub fn shell_values(kmin: i64, kmax: i64) -> Vec<i64> {
    if kmin > kmax {
        return Vec::new();
    }
    let lo = kmin.max(1);
    (lo..=kmax).flat_map(|k| [-k, k]).collect()
}

/// Dyadic shell `|k| in [K, 2K - 1]` (just `{1}` for `K = 1`).
pub fn dyadic_shell(k: i64) -> (i64, i64) {
    (k, (2 * k - 1).max(k))
}

fn nondegenerate(t: &[i64; 3]) -> bool {
    (t[0] + t[1]) * (t[1] + t[2]) * (t[2] + t[0]) != 0
}

/// Exhaustive enumeration of `A_{p,q}` over the shell `kmin <= |k_i| <= kmax`.
/// Needs `alpha` and `beta` with exact rational readings.
pub fn enumerate_apq(kmin: i64, kmax: i64, p: &PhysicalParams) -> Result<ResonanceTable> {
    let exact = ExactParams::from_params(p)?;
    let values = shell_values(kmin, kmax);
    let partial: Result<HashMap<PqKey, Vec<[i64; 3]>>> = values
        .par_iter()
        .map(|&k1| -> Result<HashMap<PqKey, Vec<[i64; 3]>>> {
            let mut local: HashMap<PqKey, Vec<[i64; 3]>> = HashMap::new();
            for &k2 in &values {
                for &k3 in &values {
                    let q = kappa_scaled(k1, k2, k3, &exact)?;
                    local.entry((k1 + k2 + k3, q)).or_default().push([k1, k2, k3]);
                }
            }
            Ok(local)
        })
        .try_reduce(HashMap::new, |mut a, b| {
            for (key, mut v) in b {
                a.entry(key).or_default().append(&mut v);
            }
            Ok(a)
        });
    let mut entries: BTreeMap<PqKey, Vec<[i64; 3]>> = partial?.into_iter().collect();
    let mut max_count = 0;
    let mut argmax = None;
    let mut nondegenerate_max_count = 0;
    for (key, triples) in entries.iter_mut() {
        triples.sort_unstable();
        if triples.len() > max_count {
            max_count = triples.len();
            argmax = Some(*key);
        }
        nondegenerate_max_count = nondegenerate_max_count.max(triples.iter().filter(|t| nondegenerate(t)).count());
    }
    Ok(ResonanceTable {
        shell: (kmin, kmax),
        exact,
        entries,
        max_count,
        argmax,
        nondegenerate_max_count,
    })
}

impl ResonanceTable {
    pub fn count(&self, p: i64, q_scaled: i128) -> usize {
        self.entries.get(&(p, q_scaled)).map_or(0, Vec::len)
    }

    /// Number of stored triples.
    pub fn total(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    /// Recomputes both defining equations and the shell bounds for every
    /// stored triple.
    pub fn verify(&self) -> Result<bool> {
        let (lo, hi) = self.shell;
        for (&(p, q), triples) in &self.entries {
            for t in triples {
                if t.iter().any(|k| k.abs() < lo || k.abs() > hi || *k == 0) {
                    return Ok(false);
                }
                if t[0] + t[1] + t[2] != p || kappa_scaled(t[0], t[1], t[2], &self.exact)? != q {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `q` as an exact rational string.
    pub fn format_q(&self, q_scaled: i128) -> String {
        format_ratio(q_scaled, self.exact.scale)
    }

    /// CSV `p,q,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,q,count\n");
        for (&(p, q), triples) in &self.entries {
            writeln!(out, "{p},{},{}", self.format_q(q), triples.len()).unwrap();
        }
        out
    }
}

pub(crate) fn format_ratio(num: i128, den: i128) -> String {
    let g = gcd(num, den);
    let (n, d) = (num / g, den / g);
    if d == 1 {
        n.to_string()
    } else {
        format!("{n}/{d}")
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// One row of the dyadic divisor-count sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: i64,
    pub shell: (i64, i64),
    pub triples: usize,
    pub max_count: usize,
    pub argmax_p: i64,
    pub argmax_q: String,
    pub nondegenerate_max_count: usize,
    pub verified: bool,
}

/// Enumerates the dyadic shells `K = 1, 2, 4, ..., kmax_top`.
pub fn dyadic_sweep(kmax_top: i64, p: &PhysicalParams) -> Result<Vec<SweepRow>> {
    if kmax_top < 1 {
        return Err(Error::InvalidParams("sweep needs K >= 1".into()));
    }
    let mut rows = Vec::new();
    let mut k = 1;
    while k <= kmax_top {
        let shell = dyadic_shell(k);
        let table = enumerate_apq(shell.0, shell.1, p)?;
        let (argmax_p, argmax_q) = table.argmax.map_or((0, "0".to_string()), |(ap, aq)| (ap, table.format_q(aq)));
        rows.push(SweepRow {
            k,
            shell,
            triples: table.total(),
            max_count: table.max_count,
            argmax_p,
            argmax_q,
            nondegenerate_max_count: table.nondegenerate_max_count,
            verified: table.verify()?,
        });
        k *= 2;
    }
    Ok(rows)
}

/// CSV `K,max_count,argmax_p,argmax_q` plus the nondegenerate count.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("K,max_count,argmax_p,argmax_q,nondegenerate_max_count\n");
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.k, r.max_count, r.argmax_p, r.argmax_q, r.nondegenerate_max_count).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_shell() {
        let p = PhysicalParams::new(1.0, 0.0, 1.0).unwrap();
        let t = enumerate_apq(1, 1, &p).unwrap();
        assert_eq!(t.total(), 8);
        assert_eq!(t.entries[&(3, -3)], vec![[1, 1, 1]]);
        assert_eq!(t.entries[&(1, -1)], vec![[-1, 1, 1], [1, -1, 1], [1, 1, -1]]);
        assert!(t.verify().unwrap());
        assert!(enumerate_apq(3, 2, &p).unwrap().entries.is_empty());
    }

    #[test]
    fn rational_keys() {
        let p = PhysicalParams::new(0.5, 1.0 / 3.0, 1.0).unwrap();
        let t = enumerate_apq(1, 2, &p).unwrap();
        assert_eq!(t.exact.scale, 6);
        assert!(t.verify().unwrap());
        // kappa(1,1,1) = -3/2 + 1 = -1/2
        assert_eq!(t.format_q(-3), "-1/2");
        assert_eq!(t.count(3, -3), 1);
        let irrational = PhysicalParams::new(std::f64::consts::PI, 0.0, 1.0).unwrap();
        assert!(matches!(enumerate_apq(1, 2, &irrational), Err(Error::NoExactKey { .. })));
    }
}
