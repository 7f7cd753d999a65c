//! TOML configuration files.
//!
//! A scenario file holds a `[scenario]` table, a `[mesh]` table and optionally a `[probe]`
//! table; a pair file holds `[scenario_a]`, `[scenario_b]`, `[mesh]` and `[probe]`; a coupled
//! file holds a single `[coupled]` table. Unknown keys are rejected everywhere.
//!
//! ```toml
//! [scenario]
//! domain = { shape = "disk", radius = 1.0 }
//! gamma_arc = { start = -1.2, end = 1.2 }
//! obstacle = { center = [0.0, 0.0], radius = 0.4 }
//! obstacle_bc = { kind = "sound-soft" }
//!
//! [[scenario.regions]]
//! shape = { kind = "band", r_in = 0.0, r_out = 1.0 }
//! conductivity = 1.0
//!
//! [mesh]
//! h = 0.05
//! ```

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Scenario;
use crate::probe::DEFAULT_TAU;
use crate::singular::SingularFamily;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    /// Polar angle of the probed boundary point.
    pub x_star_angle: f64,
    pub delta: f64,
    pub eps: f64,
    #[serde(default = "default_j_values")]
    pub j_values: Vec<u32>,
    #[serde(default = "default_tau")]
    pub tau: f64,
}

fn default_j_values() -> Vec<u32> {
    vec![4, 8, 16, 32]
}

fn default_tau() -> f64 {
    DEFAULT_TAU
}

impl ProbeConfig {
    pub fn family(&self, scenario: &Scenario) -> Result<SingularFamily> {
        SingularFamily::new(scenario, self.x_star_angle, self.delta, self.eps, self.j_values.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub mesh: MeshConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub scenario_a: Scenario,
    pub scenario_b: Scenario,
    pub mesh: MeshConfig,
    pub probe: ProbeConfig,
}

/// Coupled system on a disk subdomain with constant coefficients and a random data ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupledConfig {
    pub radius: f64,
    pub h: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Number of uniform refinements after the base mesh.
    #[serde(default)]
    pub refinements: usize,
}

fn default_samples() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupledFile {
    pub coupled: CoupledConfig,
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        check_h(self.mesh.h)?;
        self.scenario.validate()?;
        if let Some(p) = &self.probe {
            p.family(&self.scenario)?;
        }
        Ok(())
    }
}

impl PairConfig {
    pub fn validate(&self) -> Result<()> {
        check_h(self.mesh.h)?;
        self.scenario_a.validate()?;
        self.scenario_b.validate()?;
        if self.scenario_a.domain != self.scenario_b.domain || self.scenario_a.gamma_arc != self.scenario_b.gamma_arc {
            return Err(Error::Config("scenario_a and scenario_b must share domain and gamma_arc".into()));
        }
        self.probe.family(&self.scenario_a)?;
        Ok(())
    }
}

impl CoupledConfig {
    pub fn validate(&self) -> Result<()> {
        check_h(self.h)?;
        let positive = [self.radius, self.a1, self.a2, self.b1, self.b2];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Config("radius, a1, a2, b1 and b2 must be positive".into()));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        Ok(())
    }
}

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config(format!("mesh.h must be positive, got {h}")));
    }
    Ok(())
}
