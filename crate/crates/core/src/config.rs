//! Run configuration: defaults, a plain `key = value` file format and validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::boundary::Circle;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    KernelCheck,
    JensenCheck,
    EstimateVerify,
    Optimality,
    RobinStability,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::KernelCheck => "kernel-check",
            Command::JensenCheck => "jensen-check",
            Command::EstimateVerify => "estimate-verify",
            Command::Optimality => "optimality",
            Command::RobinStability => "robin-stability",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// Inner radius of the annulus.
    pub s: f64,
    pub arc_circle: Circle,
    pub arc_start: f64,
    pub arc_len: f64,
    pub n_max: usize,
    /// Regularity order for the estimates.
    pub k: usize,
    /// Fourier modes `N` of the forward solver.
    pub modes: usize,
    /// Smoothness order of the Robin coefficient.
    pub n: usize,
    pub seed: u64,
    /// Size of the random test families.
    pub samples: usize,
    /// Interior points per random function.
    pub points: usize,
    pub quad_points: usize,
    /// Boundary samples per circle for norms.
    pub nodes: usize,
    /// Overrides the command's main tolerance.
    pub tol: Option<f64>,
    pub t_list: Vec<f64>,
    pub q_mean: f64,
    pub dq_amp: f64,
    pub dq_mode: usize,
    pub plot: bool,
    #[serde(skip_serializing)]
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            s: 0.5,
            arc_circle: Circle::Outer,
            arc_start: 0.0,
            arc_len: std::f64::consts::TAU,
            n_max: 500,
            k: 3,
            modes: 64,
            n: 2,
            seed: 0,
            samples: match command {
                Command::JensenCheck => 100,
                _ => 50,
            },
            points: 20,
            quad_points: 2048,
            nodes: 256,
            tol: None,
            t_list: (1..=6).map(|e| 10f64.powi(-e)).collect(),
            q_mean: 2.0,
            dq_amp: 1.0,
            dq_mode: 1,
            plot: true,
            out_dir: PathBuf::from("out"),
        }
    }

    /// Overlays `key = value` pairs; `#` starts a comment, lists are comma separated.
    pub fn apply_key_values(&mut self, text: &str) -> Result<()> {
        let mut map = match serde_json::to_value(&*self).map_err(|e| Error::Config(e.to_string()))? {
            Value::Object(m) => m,
            _ => unreachable!("config serializes to an object"),
        };
        map.insert("out_dir".into(), Value::String(self.out_dir.display().to_string()));
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().replace('-', "_");
            if !map.contains_key(&key) {
                return Err(Error::Config(format!("line {}: unknown key `{key}`", lineno + 1)));
            }
            let value = value.trim();
            let parsed = if key == "t_list" {
                Value::Array(value.split(',').map(|v| scalar_value(v.trim())).collect())
            } else {
                scalar_value(value)
            };
            map.insert(key, parsed);
        }
        *self = serde_json::from_value(Value::Object(map)).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn from_file(command: Command, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::new(command);
        cfg.apply_key_values(&text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.s > 0.0 && self.s < 1.0) {
            return bad(format!("s must lie in (0, 1), got {}", self.s));
        }
        if !(self.arc_len > 0.0 && self.arc_len <= std::f64::consts::TAU && self.arc_start.is_finite()) {
            return bad(format!("arc_len must lie in (0, 2π], got {}", self.arc_len));
        }
        if self.n_max == 0 || self.k == 0 || self.samples == 0 || self.points == 0 {
            return bad("n_max, k, samples and points must be positive".into());
        }
        if self.modes < 2 {
            return bad(format!("modes must be at least 2, got {}", self.modes));
        }
        if self.n < 2 {
            return bad(format!("smoothness order n must be at least 2, got {}", self.n));
        }
        if !self.quad_points.is_power_of_two() || self.quad_points < 256 {
            return bad(format!("quad_points must be a power of two ≥ 256, got {}", self.quad_points));
        }
        if !self.nodes.is_power_of_two() || self.nodes < 8 {
            return bad(format!("nodes must be a power of two ≥ 8, got {}", self.nodes));
        }
        if let Some(tol) = self.tol {
            if !(tol >= 0.0 && tol.is_finite()) {
                return bad(format!("tol must be finite and non-negative, got {tol}"));
            }
        }
        if self.t_list.is_empty() || self.t_list.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return bad("t_list must be a non-empty list of non-negative numbers".into());
        }
        if !(self.q_mean > 0.0 && self.dq_amp.is_finite() && self.dq_mode >= 1) {
            return bad("need q_mean > 0, finite dq_amp and dq_mode ≥ 1".into());
        }
        Ok(())
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

fn scalar_value(v: &str) -> Value {
    if let Ok(i) = v.parse::<u64>() {
        return Value::from(i);
    }
    if let Ok(x) = v.parse::<f64>() {
        return Value::from(x);
    }
    match v {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        "none" | "" => Value::Null,
        _ => Value::String(v.trim_matches('"').to_string()),
    }
}

/// Serialized view used in the summary; `out_dir` is left out so that runs
/// differing only in their output directory produce identical summaries.
pub fn config_echo(cfg: &RunConfig) -> Map<String, Value> {
    match serde_json::to_value(cfg) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_overlay() {
        let mut cfg = RunConfig::new(Command::Optimality);
        cfg.apply_key_values("# comment\ns = 0.25\nn-max = 40  # trailing\nplot=false\nt_list = 0.1, 0.01\nout_dir = /tmp/x\n")
            .unwrap();
        assert_eq!(cfg.s, 0.25);
        assert_eq!(cfg.n_max, 40);
        assert!(!cfg.plot);
        assert_eq!(cfg.t_list, vec![0.1, 0.01]);
        assert_eq!(cfg.out_dir, PathBuf::from("/tmp/x"));
        assert_eq!(cfg.command, Command::Optimality);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        let mut cfg = RunConfig::new(Command::KernelCheck);
        assert!(matches!(cfg.apply_key_values("bogus = 1"), Err(Error::Config(_))));
        assert!(matches!(cfg.apply_key_values("s"), Err(Error::Config(_))));
        assert!(matches!(cfg.apply_key_values("n_max = -3"), Err(Error::Config(_))));
        cfg.apply_key_values("s = 1.5").unwrap();
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::new(Command::KernelCheck);
        cfg.apply_key_values("quad_points = 1000").unwrap();
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::new(Command::KernelCheck);
        cfg.apply_key_values("tol = 1e-3\narc_circle = inner").unwrap();
        assert_eq!((cfg.tol, cfg.arc_circle), (Some(1e-3), Circle::Inner));
    }

    #[test]
    fn echo_omits_output_directory() {
        let mut a = RunConfig::new(Command::JensenCheck);
        let mut b = a.clone();
        a.out_dir = "x".into();
        b.out_dir = "y".into();
        assert_eq!(config_echo(&a), config_echo(&b));
        assert_eq!(config_echo(&a)["command"], "jensen-check");
    }
}
