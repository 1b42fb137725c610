use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::params::PhysicalParams;
use crate::spectral::SpectralField;

/// One checked claim with the threshold it was held to.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Assertion {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Assertion {
            name: name.to_string(),
            passed: value <= tolerance,
            value,
            tolerance,
            detail: detail.into(),
        }
    }

    /// Passes when `value > threshold`.
    pub fn above(name: &str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Assertion {
            name: name.to_string(),
            passed: value > threshold,
            value,
            tolerance: threshold,
            detail: detail.into(),
        }
    }
}

/// Sampled quantities of one trajectory; `values[i][j]` belongs to
/// `columns[i]` at `t[j]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeSeries {
    pub label: String,
    pub columns: Vec<String>,
    pub t: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(label: impl Into<String>, columns: &[&str]) -> Self {
        TimeSeries {
            label: label.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            t: Vec::new(),
            values: vec![Vec::new(); columns.len()],
        }
    }

    pub fn push(&mut self, t: f64, row: &[f64]) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.t.push(t);
        for (col, v) in self.values.iter_mut().zip(row) {
            col.push(*v);
        }
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().position(|c| c == name).map(|i| self.values[i].as_slice())
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("t,{}\n", self.columns.join(","));
        for (j, t) in self.t.iter().enumerate() {
            out.push_str(&format!("{t:.16e}"));
            for col in &self.values {
                write!(out, ",{:.16e}", col[j]).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputSummary {
    pub data_norms: Vec<f64>,
    pub data_h2_norms: Vec<f64>,
    pub forcing_norm: f64,
    pub seeds: Vec<u64>,
    /// SHA-256 over the spectra of every input field.
    pub digest: String,
}

impl InputSummary {
    pub fn new(gs: &[SpectralField], f: &SpectralField) -> Self {
        let mut h = Sha256::new();
        for g in gs {
            h.update(g.to_json_string().as_bytes());
            h.update(b"\n");
        }
        h.update(f.to_json_string().as_bytes());
        InputSummary {
            data_norms: gs.iter().map(SpectralField::l2_norm).collect(),
            data_h2_norms: gs.iter().map(|g| g.sobolev_norm(2.0)).collect(),
            forcing_norm: f.l2_norm(),
            seeds: Vec::new(),
            digest: hex(&h.finalize()),
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Lowercase hex SHA-256.
pub(crate) fn sha256_hex(data: &[u8]) -> String {
    hex(&Sha256::digest(data))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub dt: f64,
    pub kmax: usize,
    pub t_final: f64,
    pub record_every: usize,
    pub scheme: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub params: PhysicalParams,
    pub inputs: InputSummary,
    pub series: Vec<TimeSeries>,
    pub assertions: Vec<Assertion>,
    pub summary: BTreeMap<String, f64>,
    pub provenance: Provenance,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}
