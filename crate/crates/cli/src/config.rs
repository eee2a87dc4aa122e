//! JSON run configuration.
//!
//! ```json
//! {
//!   "defect": { "lambda_g": 841.5, "quench_e": 0.1 },
//!   "field": { "direction": "[001]", "sweep": { "start": 0, "stop": 9, "steps": 19 } },
//!   "temperature_k": 4.0,
//!   "output": { "path": "sweep.csv", "format": "csv" }
//! }
//! ```
//!
//! Energies are GHz, gyromagnetic ratios GHz/T, fields T, temperatures K.
//! Omitted defect fields take the unstrained tin-vacancy defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use snv_core::defect::{DefectParameters, AXIS_111};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub defect: DefectParameters,
    #[serde(default)]
    pub field: Option<FieldSpec>,
    #[serde(default = "default_temperature")]
    pub temperature_k: f64,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { defect: DefectParameters::snv(), field: None, temperature_k: default_temperature(), output: None }
    }
}

fn default_temperature() -> f64 {
    4.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub direction: Direction,
    #[serde(default)]
    pub magnitude_tesla: Option<f64>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    /// Defect symmetry axis; `[111]` when omitted.
    #[serde(default)]
    pub axis: Option<Direction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    /// Number of field points, endpoints included.
    pub steps: usize,
}

impl SweepSpec {
    pub fn magnitudes(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        (0..self.steps).map(|k| self.start + (self.stop - self.start) * k as f64 / (self.steps - 1) as f64).collect()
    }
}

/// Lab-frame direction, either explicit or a Miller index such as `[001]`
/// or `[1-11]`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Direction {
    Vector([f64; 3]),
    Named(String),
}

impl Direction {
    pub fn vector(&self) -> Result<[f64; 3], CliError> {
        let v = match self {
            Direction::Vector(v) => *v,
            Direction::Named(name) => parse_miller(name)?,
        };
        if v.iter().any(|c| !c.is_finite()) || v.iter().all(|c| *c == 0.0) {
            return Err(CliError::Config(format!("direction {self:?} must be a finite non-zero vector")));
        }
        Ok(v)
    }
}

pub fn parse_miller(text: &str) -> Result<[f64; 3], CliError> {
    let bad = || CliError::Config(format!("cannot read direction {text:?}; expected a form like [001] or [1-11]"));
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    let mut out = Vec::with_capacity(3);
    let mut negative = false;
    for ch in inner.chars() {
        match ch {
            '-' if !negative => negative = true,
            d if d.is_ascii_digit() => {
                let v = f64::from(d.to_digit(10).expect("ascii digit"));
                out.push(if negative { -v } else { v });
                negative = false;
            }
            _ => return Err(bad()),
        }
    }
    if negative || out.len() != 3 {
        return Err(bad());
    }
    Ok([out[0], out[1], out[2]])
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.defect.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if !(self.temperature_k > 0.0) || !self.temperature_k.is_finite() {
            return Err(CliError::Config(format!("temperature_k must be positive, got {}", self.temperature_k)));
        }
        if let Some(field) = &self.field {
            field.direction.vector()?;
            if let Some(axis) = &field.axis {
                axis.vector()?;
            }
            match (field.magnitude_tesla, field.sweep) {
                (Some(_), Some(_)) => {
                    return Err(CliError::Config("field takes either magnitude_tesla or sweep, not both".into()));
                }
                (Some(b), None) if !(b >= 0.0) || !b.is_finite() => {
                    return Err(CliError::Config(format!("magnitude_tesla must be non-negative, got {b}")));
                }
                (None, Some(s)) => validate_sweep(&s)?,
                _ => {}
            }
        }
        Ok(())
    }

    pub fn axis(&self) -> Result<[f64; 3], CliError> {
        match self.field.as_ref().and_then(|f| f.axis.as_ref()) {
            Some(a) => a.vector(),
            None => Ok(AXIS_111),
        }
    }

    /// Field direction, falling back to `default` when no field is configured.
    pub fn direction_or(&self, default: [f64; 3]) -> Result<[f64; 3], CliError> {
        match &self.field {
            Some(f) => f.direction.vector(),
            None => Ok(default),
        }
    }
}

pub fn validate_sweep(s: &SweepSpec) -> Result<(), CliError> {
    if s.steps < 1 || !(s.start <= s.stop) || !(s.start >= 0.0) || !s.stop.is_finite() {
        return Err(CliError::Config(format!(
            "sweep needs 0 <= start <= stop and steps >= 1, got start {} stop {} steps {}",
            s.start, s.stop, s.steps
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = r#"{
            "defect": {"lambda_g": 800.0},
            "field": {"direction": "[001]", "sweep": {"start": 0, "stop": 9, "steps": 19}},
            "temperature_k": 4.0,
            "output": {"path": "sweep.csv", "format": "csv"}
        }"#;
        let config: RunConfig = serde_json::from_str(text).unwrap();
        config.validate().unwrap();
        assert_eq!(config.defect.lambda_g, 800.0);
        assert_eq!(config.defect.lambda_e, DefectParameters::snv().lambda_e);
        let sweep = config.field.unwrap().sweep.unwrap().magnitudes();
        assert_eq!(sweep.len(), 19);
        assert_eq!(sweep[1], 0.5);
        assert_eq!(sweep[18], 9.0);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"temperature": 4}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"defect": {"lambda": 4}}"#).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            r#"{"temperature_k": 0}"#,
            r#"{"field": {"direction": [0, 0, 0], "magnitude_tesla": 1}}"#,
            r#"{"field": {"direction": "[001]", "sweep": {"start": 2, "stop": 1, "steps": 3}}}"#,
            r#"{"field": {"direction": "[001]", "sweep": {"start": 0, "stop": 1, "steps": 0}}}"#,
            r#"{"field": {"direction": "[001]", "magnitude_tesla": 1, "sweep": {"start": 0, "stop": 1, "steps": 2}}}"#,
        ];
        for text in bad {
            let config: RunConfig = serde_json::from_str(text).unwrap();
            assert!(config.validate().is_err(), "{text}");
        }
    }

    #[test]
    fn miller_indices() {
        assert_eq!(parse_miller("[001]").unwrap(), [0.0, 0.0, 1.0]);
        assert_eq!(parse_miller("[1-11]").unwrap(), [1.0, -1.0, 1.0]);
        assert!(parse_miller("[01]").is_err());
        assert!(parse_miller("[0a1]").is_err());
    }
}
