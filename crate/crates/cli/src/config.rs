//! Run configuration: a single JSON document per run.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use twonorm::{Config, Interpolation};

/// Relative `output_dir` values are resolved against this directory when it is set.
pub const OUTPUT_ROOT_ENV: &str = "TWONORM_OUTPUT_ROOT";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config error at `{field}` (line {line}, column {column}): {message}")]
    Parse {
        field: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Sin,
    Cos,
    Zero,
    Constant,
}

/// Initial profile `amplitude * shape(2 pi x / L)`; `constant` is the value `amplitude`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub shape: Shape,
    #[serde(default = "one")]
    pub amplitude: f64,
}

impl Default for Profile {
    fn default() -> Self {
        Self {
            shape: Shape::Sin,
            amplitude: 1.0,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn default_n() -> usize {
    1024
}

fn default_length() -> f64 {
    TAU
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayParams {
    #[serde(default = "one")]
    pub rate: f64,
    #[serde(default = "one")]
    pub x0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiccatiParams {
    #[serde(default = "one")]
    pub x0: f64,
}

/// `u_t = G(x) u_x - damping * u` with `G(x) = speed + speed_variation * sin(2 pi x / L)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdvectParams {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_length")]
    pub length: f64,
    #[serde(default)]
    pub interpolation: Interpolation,
    #[serde(default)]
    pub profile: Profile,
    #[serde(default = "one")]
    pub speed: f64,
    #[serde(default)]
    pub speed_variation: f64,
    #[serde(default)]
    pub damping: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BurgersParams {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_length")]
    pub length: f64,
    #[serde(default)]
    pub interpolation: Interpolation,
    #[serde(default)]
    pub profile: Profile,
}

/// A registered instance and its parameters, tagged by `name`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum InstanceConfig {
    #[serde(rename = "ode.decay")]
    Decay(DecayParams),
    #[serde(rename = "ode.riccati")]
    Riccati(RiccatiParams),
    #[serde(rename = "transport.advect")]
    Advect(AdvectParams),
    #[serde(rename = "transport.burgers")]
    Burgers(BurgersParams),
}

impl InstanceConfig {
    pub fn name(&self) -> &'static str {
        match self {
            InstanceConfig::Decay(_) => "ode.decay",
            InstanceConfig::Riccati(_) => "ode.riccati",
            InstanceConfig::Advect(_) => "transport.advect",
            InstanceConfig::Burgers(_) => "transport.burgers",
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let finite = |field: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(field, format!("must be finite, got {v}")))
            }
        };
        let grid = |n: usize, length: f64, profile: &Profile| {
            if n < 16 {
                return Err(invalid("instance.n", format!("need n >= 16, got {n}")));
            }
            if !(length > 0.0 && length.is_finite()) {
                return Err(invalid("instance.length", "must be positive and finite"));
            }
            finite("instance.profile.amplitude", profile.amplitude)
        };
        match self {
            InstanceConfig::Decay(p) => {
                finite("instance.x0", p.x0)?;
                if !(p.rate >= 0.0 && p.rate.is_finite()) {
                    return Err(invalid("instance.rate", "must be non-negative and finite"));
                }
                Ok(())
            }
            InstanceConfig::Riccati(p) => finite("instance.x0", p.x0),
            InstanceConfig::Advect(p) => {
                grid(p.n, p.length, &p.profile)?;
                finite("instance.speed", p.speed)?;
                finite("instance.speed_variation", p.speed_variation)?;
                finite("instance.damping", p.damping)
            }
            InstanceConfig::Burgers(p) => grid(p.n, p.length, &p.profile),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmitFlags {
    pub report: bool,
    pub norms: bool,
    pub windows: bool,
    pub trajectory: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        Self {
            report: true,
            norms: true,
            windows: true,
            trajectory: false,
        }
    }
}

impl EmitFlags {
    pub fn none() -> Self {
        Self {
            report: false,
            norms: false,
            windows: false,
            trajectory: false,
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub instance: InstanceConfig,
    #[serde(default)]
    pub solver: Config,
    pub t_max: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub emit: EmitFlags,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let field = e.path().to_string();
            let inner = e.into_inner();
            ConfigError::Parse {
                field,
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.instance.validate()?;
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(invalid("t_max", "must be positive and finite"));
        }
        self.solver
            .validate()
            .map_err(|e| invalid("solver", e.to_string()))
    }

    /// `output_dir`, placed under `$TWONORM_OUTPUT_ROOT` when that is set and the path is
    /// relative.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ROOT_ENV) {
            Some(root) if !root.is_empty() => PathBuf::from(root).join(&self.output_dir),
            _ => self.output_dir.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg =
            RunConfig::from_json(r#"{"instance": {"name": "ode.riccati"}, "t_max": 2}"#).unwrap();
        assert_eq!(
            cfg.instance,
            InstanceConfig::Riccati(RiccatiParams { x0: 1.0 })
        );
        assert_eq!(cfg.solver, Config::default());
        assert_eq!(cfg.emit, EmitFlags::default());
    }

    #[test]
    fn unknown_instance_is_reported() {
        let err =
            RunConfig::from_json(r#"{"instance": {"name": "ode.nope"}, "t_max": 1}"#).unwrap_err();
        assert!(err.to_string().contains("ode.nope"), "{err}");
    }

    #[test]
    fn solver_field_error_has_path_and_position() {
        let text = "{\n  \"instance\": {\"name\": \"ode.decay\"},\n  \"t_max\": 5,\n  \"solver\": {\"kappa\": \"two\"}\n}";
        match RunConfig::from_json(text).unwrap_err() {
            ConfigError::Parse {
                field,
                line,
                column,
                ..
            } => {
                assert_eq!(field, "solver.kappa");
                assert_eq!(line, 4);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_top_level_field_is_rejected() {
        let err =
            RunConfig::from_json(r#"{"instance": {"name": "ode.decay"}, "t_max": 5, "tmax": 1}"#)
                .unwrap_err();
        assert!(err.to_string().contains("tmax"), "{err}");
    }

    #[test]
    fn ranges_are_checked() {
        let bad_n = r#"{"instance": {"name": "transport.burgers", "n": 4}, "t_max": 1}"#;
        assert!(matches!(
            RunConfig::from_json(bad_n),
            Err(ConfigError::Invalid { .. })
        ));
        let bad_t = r#"{"instance": {"name": "ode.decay"}, "t_max": -1}"#;
        assert!(matches!(
            RunConfig::from_json(bad_t),
            Err(ConfigError::Invalid { .. })
        ));
        let bad_solver =
            r#"{"instance": {"name": "ode.decay"}, "t_max": 1, "solver": {"kappa": 0.5}}"#;
        assert!(matches!(
            RunConfig::from_json(bad_solver),
            Err(ConfigError::Invalid { .. })
        ));
    }

    #[test]
    fn transport_params_parse() {
        let cfg = RunConfig::from_json(
            r#"{"instance": {"name": "transport.advect", "n": 128, "interpolation": "linear",
                "profile": {"shape": "cos", "amplitude": 0.5}, "speed_variation": 0.25},
                "t_max": 1, "emit": {"trajectory": true}}"#,
        )
        .unwrap();
        let InstanceConfig::Advect(p) = &cfg.instance else {
            panic!("wrong variant");
        };
        assert_eq!(p.n, 128);
        assert_eq!(p.interpolation, Interpolation::Linear);
        assert_eq!(p.profile.shape, Shape::Cos);
        assert_eq!(p.speed, 1.0);
        assert!(cfg.emit.trajectory && cfg.emit.norms);
    }
}
