//! Run configuration, read from JSON. The accepted shape is documented in
//! `schema/run-config.schema.json`; unknown keys are rejected.

use std::path::Path;

use clebsch::scenario::{STANDARD_H, STANDARD_K_RADIUS, STANDARD_SEED, STANDARD_T};
use clebsch::{BodyState, SystemParams};
use serde::{Deserialize, Serialize};

/// Version of the config layout this build understands.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub params: SystemParams,
    /// Explicit initial state; when absent one is drawn from `seed`.
    #[serde(default)]
    pub state: Option<StateSpec>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_k_radius")]
    pub k_radius: f64,
    #[serde(default = "default_t")]
    pub t_final: f64,
    #[serde(default = "default_h")]
    pub h: f64,
    /// Integral levels for `kummer` and `actions`; default: those of the state.
    #[serde(default)]
    pub levels: Option<Levels>,
    #[serde(default)]
    pub invariants: InvariantsOptions,
    #[serde(default)]
    pub actions: ActionsOptions,
    #[serde(default)]
    pub special: SpecialOptions,
    /// Output directory, overridden by `--out`.
    #[serde(default)]
    pub out_dir: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub k: [f64; 3],
    pub p: [f64; 3],
}

impl From<StateSpec> for BodyState {
    fn from(s: StateSpec) -> Self {
        BodyState::new(s.k, s.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Levels {
    pub c3: f64,
    pub c4: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantsOptions {
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionsOptions {
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecialOptions {
    /// Defaults to `(j2 + j3) / 2`; real families need `j2 < s' < j3`.
    #[serde(default)]
    pub sigma_prime: Option<f64>,
    #[serde(default = "default_axis_k")]
    pub axis_k: f64,
    #[serde(default = "default_axis_angle")]
    pub axis_angle: f64,
}

fn default_seed() -> u64 {
    STANDARD_SEED
}
fn default_k_radius() -> f64 {
    STANDARD_K_RADIUS
}
fn default_t() -> f64 {
    STANDARD_T
}
fn default_h() -> f64 {
    STANDARD_H
}
fn default_samples() -> usize {
    1000
}
fn default_fd_step() -> f64 {
    1e-5
}
fn default_quad_tol() -> f64 {
    1e-12
}
fn default_axis_k() -> f64 {
    0.8
}
fn default_axis_angle() -> f64 {
    0.3
}

impl Default for InvariantsOptions {
    fn default() -> Self {
        InvariantsOptions { samples: default_samples() }
    }
}

impl Default for ActionsOptions {
    fn default() -> Self {
        ActionsOptions { fd_step: default_fd_step(), quad_tol: default_quad_tol() }
    }
}

impl Default for SpecialOptions {
    fn default() -> Self {
        SpecialOptions { sigma_prime: None, axis_k: default_axis_k(), axis_angle: default_axis_angle() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks the ranges serde cannot express.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError(m.to_string()));
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.t_final) {
            return bad("t_final must be positive and finite");
        }
        if !positive(self.h) || self.h > self.t_final {
            return bad("h must be positive and at most t_final");
        }
        if !positive(self.k_radius) {
            return bad("k_radius must be positive and finite");
        }
        if let Some(s) = &self.state {
            if !s.k.iter().chain(&s.p).all(|v| v.is_finite()) {
                return bad("state entries must be finite");
            }
        }
        if let Some(l) = &self.levels {
            if !(l.c3.is_finite() && l.c4.is_finite()) {
                return bad("levels must be finite");
            }
        }
        if self.invariants.samples == 0 {
            return bad("invariants.samples must be at least 1");
        }
        if !positive(self.actions.fd_step) || !positive(self.actions.quad_tol) {
            return bad("actions.fd_step and actions.quad_tol must be positive");
        }
        let sp = &self.special;
        if !(sp.axis_k.is_finite() && sp.axis_angle.is_finite() && sp.sigma_prime.is_none_or(f64::is_finite)) {
            return bad("special options must be finite");
        }
        Ok(())
    }

    /// The initial state: explicit if given, otherwise the first leaf
    /// state of the seeded stream.
    pub fn initial_state(&self) -> BodyState {
        match self.state {
            Some(s) => s.into(),
            None => clebsch::scenario::leaf_states(1, self.seed, self.k_radius)[0],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"schema_version": 1, "params": {"j": [1, 2, 3], "lambda": 1, "lambda_prime": 1}}"#;

    #[test]
    fn defaults_are_the_standard_run() {
        let c = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!((c.seed, c.t_final, c.h), (STANDARD_SEED, STANDARD_T, STANDARD_H));
        assert_eq!(c.initial_state(), clebsch::scenario::standard_state());
        assert_eq!(c.invariants.samples, 1000);
    }

    #[test]
    fn ranges_are_checked() {
        let mut c = RunConfig::from_json(MINIMAL).unwrap();
        c.h = 20.0;
        assert!(c.validate().is_err());
        c.h = 1e-3;
        c.special.sigma_prime = Some(f64::NAN);
        assert!(c.validate().is_err());
    }
}
