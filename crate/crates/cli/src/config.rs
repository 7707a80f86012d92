//! Flat key=value run configuration.
//!
//! The format is line oriented: `key = value`, `#` starts a comment, blank
//! lines are skipped. Every diagnostic carries the 1-based line number so a
//! bad file can be fixed without guessing.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Which propagation backend a command should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Analytic,
    Solver,
    Both,
}

impl EngineChoice {
    /// Engines to run, in output order.
    pub fn selected(self) -> Vec<&'static str> {
        match self {
            EngineChoice::Analytic => vec!["analytic"],
            EngineChoice::Solver => vec!["solver"],
            EngineChoice::Both => vec!["analytic", "solver"],
        }
    }
}

impl FromStr for EngineChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(EngineChoice::Analytic),
            "solver" => Ok(EngineChoice::Solver),
            "both" => Ok(EngineChoice::Both),
            other => Err(format!(
                "unknown engine '{other}' (expected analytic, solver, or both)"
            )),
        }
    }
}

impl fmt::Display for EngineChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            EngineChoice::Analytic => "analytic",
            EngineChoice::Solver => "solver",
            EngineChoice::Both => "both",
        };
        f.write_str(name)
    }
}

/// A fully resolved run configuration. Physical values are in the natural
/// unit system of the model (hbar = 1); no conversion layer exists.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Particle mass (key `m`).
    pub mass: f64,
    /// Viscous damping coefficient (key `eta`).
    pub damping: f64,
    /// White-noise diffusion strength (key `D`); zero means no force.
    pub noise: f64,
    /// Initial packet width (key `sigma0`).
    pub sigma0: f64,
    /// Initial packet center (key `x0`).
    pub x0: f64,
    /// Simulated time span (key `t_end`).
    pub t_end: f64,
    /// Number of time steps (key `n_steps`).
    pub n_steps: usize,
    /// Left edge of the solver domain (key `x_min`).
    pub x_min: f64,
    /// Right edge of the solver domain (key `x_max`).
    pub x_max: f64,
    /// Solver grid points (key `n_points`).
    pub n_points: usize,
    /// Ensemble size (key `n_paths`).
    pub n_paths: usize,
    /// Base RNG seed (key `seed`).
    pub seed: u64,
    /// Backend selection (key `engine`).
    pub engine: EngineChoice,
    /// Times at which ensemble statistics are checked against the diffusion
    /// law (key `probe_times`, comma separated).
    pub probe_times: Vec<f64>,
}

/// A parse or validation failure, with its line when one applies.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "config line {n}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn at(line: usize, message: String) -> ConfigError {
    ConfigError {
        line: Some(line),
        message,
    }
}

const KNOWN_KEYS: &[&str] = &[
    "m",
    "eta",
    "D",
    "sigma0",
    "x0",
    "t_end",
    "n_steps",
    "x_min",
    "x_max",
    "n_points",
    "n_paths",
    "seed",
    "engine",
    "probe_times",
];

const REQUIRED_KEYS: &[&str] = &["m", "eta", "D", "sigma0", "t_end", "n_steps"];

/// Parses a config file body. Unknown keys, duplicates, and malformed
/// values are errors; optional keys fall back to documented defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut seen: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let body = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let body = body.trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| at(line_no, format!("expected key = value, got '{body}'")))?;
        let key = key.trim();
        let value = value.trim().to_string();
        let known = KNOWN_KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| at(line_no, format!("unknown key '{key}'")))?;
        if let Some((first, _)) = seen.get(known) {
            return Err(at(
                line_no,
                format!("duplicate key '{key}' (first set on line {first})"),
            ));
        }
        seen.insert(known, (line_no, value));
    }

    for key in REQUIRED_KEYS {
        if !seen.contains_key(key) {
            return Err(ConfigError {
                line: None,
                message: format!("missing required key '{key}'"),
            });
        }
    }

    let float = |key: &str| -> Result<Option<f64>, ConfigError> {
        seen.get(key)
            .map(|(line, value)| {
                value
                    .parse::<f64>()
                    .map_err(|_| at(*line, format!("key '{key}': '{value}' is not a number")))
            })
            .transpose()
    };
    let count = |key: &str| -> Result<Option<usize>, ConfigError> {
        seen.get(key)
            .map(|(line, value)| {
                value.parse::<usize>().map_err(|_| {
                    at(
                        *line,
                        format!("key '{key}': '{value}' is not a whole number"),
                    )
                })
            })
            .transpose()
    };

    let engine = match seen.get("engine") {
        Some((line, value)) => value
            .parse::<EngineChoice>()
            .map_err(|msg| at(*line, msg))?,
        None => EngineChoice::Analytic,
    };

    let probe_times = match seen.get("probe_times") {
        Some((line, value)) if !value.is_empty() => value
            .split(',')
            .map(|item| {
                let item = item.trim();
                item.parse::<f64>()
                    .map_err(|_| at(*line, format!("probe_times entry '{item}' is not a number")))
            })
            .collect::<Result<Vec<f64>, ConfigError>>()?,
        _ => Vec::new(),
    };

    let seed = match seen.get("seed") {
        Some((line, value)) => value
            .parse::<u64>()
            .map_err(|_| at(*line, format!("key 'seed': '{value}' is not a valid seed")))?,
        None => 0,
    };

    Ok(RunConfig {
        mass: float("m")?.expect("required"),
        damping: float("eta")?.expect("required"),
        noise: float("D")?.expect("required"),
        sigma0: float("sigma0")?.expect("required"),
        x0: float("x0")?.unwrap_or(0.0),
        t_end: float("t_end")?.expect("required"),
        n_steps: count("n_steps")?.expect("required"),
        x_min: float("x_min")?.unwrap_or(-32.0),
        x_max: float("x_max")?.unwrap_or(32.0),
        n_points: count("n_points")?.unwrap_or(1024),
        n_paths: count("n_paths")?.unwrap_or(2000),
        seed,
        engine,
        probe_times,
    })
}
