//! Artifact serialization. Every file is assembled in memory first and
//! written in one call, and nothing in it depends on the clock, so a rerun
//! with the same config produces byte-identical output.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Formats one CSV table. The `{}` float form is the shortest decimal that
/// parses back to the same bits, which is what makes reruns comparable with
/// a plain byte diff.
pub fn csv_string(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let mut first = true;
        for value in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&format!("{value}"));
        }
        out.push('\n');
    }
    out
}

/// Writes `content` to `dir/name`, creating the directory if needed.
pub fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Run(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, content)
        .map_err(|e| CliError::Run(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Serializes a manifest as pretty JSON with a trailing newline.
pub fn json_string<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("manifest types always serialize");
    text.push('\n');
    text
}

#[derive(Debug, Serialize)]
pub struct ParamsOut {
    pub m: f64,
    pub eta: f64,
    #[serde(rename = "D")]
    pub noise: f64,
    pub gamma: f64,
}

#[derive(Debug, Serialize)]
pub struct PacketOut {
    pub sigma0: f64,
    pub x0: f64,
}

#[derive(Debug, Serialize)]
pub struct TimeGridOut {
    pub t_end: f64,
    pub n_steps: usize,
    pub dt: f64,
}

#[derive(Debug, Serialize)]
pub struct SpaceGridOut {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub dx: f64,
}

#[derive(Debug, Serialize)]
pub struct ForceOut {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// One numeric quality gate: a measured value against its allowance. These
/// are recorded for the reader; only `verify` turns failures into a nonzero
/// exit.
#[derive(Debug, Serialize)]
pub struct CheckOut {
    pub name: &'static str,
    pub measured: f64,
    pub allowed: f64,
    pub passed: bool,
}

impl CheckOut {
    pub fn new(name: &'static str, measured: f64, allowed: f64) -> Self {
        CheckOut {
            name,
            measured,
            allowed,
            passed: measured.abs() <= allowed,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SimulateManifest {
    pub command: &'static str,
    pub params: ParamsOut,
    pub packet: PacketOut,
    pub time_grid: TimeGridOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space_grid: Option<SpaceGridOut>,
    pub force: ForceOut,
    pub engines: Vec<&'static str>,
    pub outputs: Vec<String>,
    pub checks: Vec<CheckOut>,
}

/// Ensemble spread at one requested probe time versus the diffusion law
/// for the center variance, with the three-sigma sampling allowance.
#[derive(Debug, Serialize)]
pub struct ProbeOut {
    pub t: f64,
    pub node: usize,
    pub measured_var: f64,
    pub law_var: f64,
    pub relative_deviation: f64,
    pub allowed: f64,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct EnsembleRunOut {
    pub engine: &'static str,
    pub output: String,
    pub decomposition: CheckOut,
    pub probes: Vec<ProbeOut>,
}

#[derive(Debug, Serialize)]
pub struct EnsembleManifest {
    pub command: &'static str,
    pub params: ParamsOut,
    pub packet: PacketOut,
    pub time_grid: TimeGridOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space_grid: Option<SpaceGridOut>,
    pub n_paths: usize,
    pub base_seed: u64,
    pub runs: Vec<EnsembleRunOut>,
}

#[derive(Debug, Serialize)]
pub struct VerifyItem {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<VerifyItem>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_values_round_trip_exactly() {
        let rows = vec![
            vec![0.1 + 0.2, 1.0 / 3.0, -0.0],
            vec![f64::MIN_POSITIVE, 1e300, 2.0f64.sqrt()],
        ];
        let text = csv_string(&["a", "b", "c"], &rows);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("a,b,c"));
        for (line, row) in lines.zip(&rows) {
            for (field, &value) in line.split(',').zip(row) {
                let back: f64 = field.parse().unwrap();
                assert_eq!(back.to_bits(), value.to_bits(), "field {field}");
            }
        }
    }

    #[test]
    fn check_gate_is_inclusive() {
        assert!(CheckOut::new("gate", 1.0, 1.0).passed);
        assert!(!CheckOut::new("gate", -1.1, 1.0).passed);
    }
}
