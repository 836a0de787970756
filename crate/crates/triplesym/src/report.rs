//! Measured constants and report serialization (CSV rows + JSON summaries).
//!
//! Every certification in the crate reduces to sup-ratios measured over a
//! probe grid, re-measured on a refined grid. A ratio that keeps growing
//! under refinement signals an unbounded quantity, so stability of the sup
//! is the boundedness oracle.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// Stability band for `value(h/2) / value(h)`.
pub const REFINEMENT_BAND: (f64, f64) = (0.5, 1.5);

/// A sup of `|quantity| / bound` over a grid, together with its behavior
/// under grid refinement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasuredConstant {
    pub name: String,
    /// sup over the grid (coarse resolution)
    pub value: f64,
    /// sup on the factor-2 refined grid divided by `value`
    pub refinement_ratio: f64,
    pub grid: String,
    /// points skipped because the denominator was below the floor
    pub skipped: usize,
    /// total points probed (coarse grid)
    pub probed: usize,
}

impl MeasuredConstant {
    pub fn from_sups(name: &str, coarse: f64, fine: f64, grid: String) -> Self {
        let refinement_ratio = if coarse > 0.0 {
            fine / coarse
        } else if fine == 0.0 {
            1.0
        } else {
            f64::INFINITY
        };
        MeasuredConstant {
            name: name.to_string(),
            value: coarse.max(fine),
            refinement_ratio,
            grid,
            skipped: 0,
            probed: 0,
        }
    }

    /// Refinement-stable per the band; a genuinely bounded ratio's sup should
    /// not move much when the grid is refined.
    pub fn stable(&self) -> bool {
        self.value.is_finite()
            && self.refinement_ratio >= REFINEMENT_BAND.0
            && self.refinement_ratio <= REFINEMENT_BAND.1
    }
}

/// Outcome of one named certification: a set of measured constants plus a
/// verdict and optional witness points for failures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertReport {
    pub name: String,
    pub pass: bool,
    pub constants: Vec<MeasuredConstant>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Witness {
    pub t: f64,
    pub y: f64,
    pub what: String,
}

impl CertReport {
    pub fn passing(name: &str, constants: Vec<MeasuredConstant>) -> Self {
        let pass = constants.iter().all(|c| c.stable());
        CertReport {
            name: name.to_string(),
            pass,
            constants,
            witnesses: vec![],
            note: None,
        }
    }

    pub fn failed(name: &str, witnesses: Vec<Witness>, note: &str) -> Self {
        CertReport {
            name: name.to_string(),
            pass: false,
            constants: vec![],
            witnesses,
            note: Some(note.to_string()),
        }
    }
}

/// Format a float with 17 significant digits (fixed formatting so identical
/// runs produce byte-identical files).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write CSV rows: `header` then one row per record, floats at 17 significant
/// digits.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            let _ = write!(out, "{}", fmt_f64(*v));
            first = false;
        }
        out.push('\n');
    }
    std::fs::write(path, out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let s = serde_json::to_string_pretty(value).expect("serializable report");
    std::fs::write(path, s + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stability_band() {
        let ok = MeasuredConstant::from_sups("r", 2.0, 2.2, "g".into());
        assert!(ok.stable());
        let bad = MeasuredConstant::from_sups("r", 2.0, 4.4, "g".into());
        assert!(!bad.stable());
        let zero = MeasuredConstant::from_sups("r", 0.0, 0.0, "g".into());
        assert!(zero.stable());
    }

    #[test]
    fn csv_fixed_width_floats() {
        assert_eq!(fmt_f64(0.25), "2.5000000000000000e-1");
        assert_eq!(fmt_f64(1.0 / 3.0).len(), "3.3333333333333331e-1".len());
    }
}
