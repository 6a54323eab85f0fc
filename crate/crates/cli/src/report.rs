//! JSON report and CSV artifacts.
//!
//! Struct field order is the key order in the output. Floats are written in
//! shortest round-trip form, so parsing the report gives back the exact
//! in-memory values.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: u32,
    pub mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionSection>,
    pub bound_states: Vec<BoundStateEntry>,
    pub checks: Vec<CheckEntry>,
    pub notes: Vec<String>,
    pub parameters: Parameters,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenfunction: Option<EigenfunctionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evolution: Option<EvolutionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dephasing: Option<DephasingSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepEntry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionSection {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Two-point: jump matrix. Delta-prime: matrix giving the one-sided
    /// values from the one-sided derivatives.
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub b: Option<[[f64; 2]; 2]>,
    pub relation: &'static str,
    pub local: bool,
    pub parity_symmetric: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entanglement_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoupled: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundStateEntry {
    pub kappa: f64,
    pub lambda: f64,
    pub multiplicity: usize,
    pub parity: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckEntry {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }

    pub fn condition(name: impl Into<String>, holds: bool) -> Self {
        Self::new(name, if holds { 0.0 } else { 1.0 }, 0.0)
    }
}

impl From<&pointspec::Check> for CheckEntry {
    fn from(c: &pointspec::Check) -> Self {
        Self {
            name: c.name.clone(),
            value: c.value,
            tolerance: c.tolerance,
            pass: c.pass,
        }
    }
}

/// Resolved run parameters, echoed so a report documents its own inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Parameters {
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n: usize,
    pub dt: f64,
    pub steps: usize,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub ensemble: usize,
    pub seed: u64,
    pub tol: f64,
    pub threshold: f64,
    pub state: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenfunctionSection {
    pub state: &'static str,
    pub kappa: f64,
    pub lambda: f64,
    pub samples: usize,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSection {
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n: usize,
    pub dx: f64,
    pub unknowns: usize,
    pub far_couplings: usize,
    pub hermiticity_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SidesEntry {
    pub left: f64,
    pub gap: f64,
    pub right: f64,
}

impl From<pointspec::dynamics::SideProbabilities> for SidesEntry {
    fn from(s: pointspec::dynamics::SideProbabilities) -> Self {
        Self {
            left: s.left,
            gap: s.gap,
            right: s.right,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionSection {
    pub state: &'static str,
    pub dt: f64,
    pub steps: usize,
    pub t_final: f64,
    pub record_every: usize,
    pub samples: usize,
    pub max_norm_drift: f64,
    pub initial_sides: SidesEntry,
    pub final_sides: SidesEntry,
    pub max_p_left: f64,
    pub max_p_right: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_period: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_period: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_oracle_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceEntry {
    pub reference: &'static str,
    pub mean_overlap_sq: f64,
    pub incoherent: f64,
    pub cross_term: f64,
    pub mean_overlap_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DephasingSection {
    pub state: &'static str,
    pub ensemble: usize,
    pub threshold: f64,
    pub sides_before: SidesEntry,
    pub sides_after: SidesEntry,
    pub members_invariant: bool,
    pub max_kick_deviation: f64,
    pub references: Vec<ReferenceEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coherence: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub alpha: f64,
    pub beta: f64,
    pub h: f64,
    pub roots: usize,
    pub max_discrepancy: f64,
    pub pass: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes to `path`, or stdout when `None`.
    pub fn write(&self, path: Option<&Path>) -> Result<(), CliError> {
        let text = self.to_json();
        match path {
            Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// A header plus rows of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Comma separated, `.` decimal point, shortest round-trip floats.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v:?}").expect("write to string");
            }
            out.push('\n');
        }
        out
    }
}

/// CSV files produced by a run, written only after the run succeeds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    pub tables: Vec<(PathBuf, Table)>,
}

impl Artifacts {
    pub fn add(&mut self, path: Option<&Path>, table: impl FnOnce() -> Table) {
        if let Some(p) = path {
            self.tables.push((p.to_path_buf(), table()));
        }
    }

    pub fn write(&self) -> Result<(), CliError> {
        for (path, table) in &self.tables {
            fs::write(path, table.to_csv()).map_err(|e| CliError::io(path, e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_floats_round_trip() {
        let mut t = Table::new(vec!["x", "y"]);
        t.push(vec![0.1 + 0.2, -1e-300]);
        t.push(vec![1.0, 2.5e10]);
        let text = t.to_csv();
        assert_eq!(text.lines().next(), Some("x,y"));
        let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row, vec![0.1 + 0.2, -1e-300]);
        assert_eq!(text.lines().nth(2), Some("1.0,25000000000.0"));
    }

    #[test]
    fn check_entries_grade_themselves() {
        assert!(CheckEntry::new("a", 1e-10, 1e-9).pass);
        assert!(!CheckEntry::new("a", 1e-8, 1e-9).pass);
        assert!(CheckEntry::condition("b", true).pass);
        assert!(!CheckEntry::condition("b", false).pass);
        assert!(!CheckEntry::new("nan", f64::NAN, 1.0).pass);
    }
}
