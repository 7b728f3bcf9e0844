//! The structured config file: one TOML document with a section per kind
//! of input, of which each subcommand reads the ones it needs.

use crate::Failure;
use conslaw_core::randstats::InitialLaw;
use conslaw_core::scenario::{self, BlockScenario, ParticleScenario};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particles: Option<ParticleScenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BlockScenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux: Option<FluxSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<InitialLaw>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hierarchy: Option<HierarchySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shock_scan: Option<ShockScanSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSection>,
}

/// Time grid and an optional comparison tolerance.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default)]
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

/// Piecewise-linear flux given by its values on the state lattice.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxSection {
    pub states: Vec<f64>,
    pub values: Vec<f64>,
}

/// Ensemble size, spatial domain for path sampling, and the time the
/// realizations are evolved to before estimation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub size: usize,
    pub domain: (f64, f64),
    #[serde(default)]
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateKindConfig {
    P1,
    FrontDensity,
    PairCoincidence,
}

/// What to estimate and where.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSection {
    pub kind: EstimateKindConfig,
    pub points: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HierarchyKindConfig {
    First,
    Second,
}

/// Residual evaluation of one of the two evolution identities.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HierarchySection {
    pub kind: HierarchyKindConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<(usize, usize)>,
    pub points: Vec<f64>,
    pub time: f64,
    pub dt: f64,
    pub window: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

/// Parabola-contact shock sampling over an ensemble of potential paths.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShockScanSection {
    pub paths: usize,
    pub domain: (f64, f64),
    pub window: (f64, f64),
    pub time: f64,
    pub probes: usize,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

fn default_bins() -> usize {
    40
}

/// Observation point for potential-branch output.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub x: f64,
    pub time: f64,
}

/// Spatial grid for solution profiles.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

pub fn load(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| Failure::Config(format!("malformed config {}:\n{e}", path.display())))
}

fn missing(section: &str) -> Failure {
    Failure::Config(format!(
        "config needs a [{section}] section for this command"
    ))
}

impl RunConfig {
    pub fn particles(&self) -> Result<&ParticleScenario, Failure> {
        self.particles.as_ref().ok_or_else(|| missing("particles"))
    }

    pub fn blocks(&self) -> Result<&BlockScenario, Failure> {
        self.blocks.as_ref().ok_or_else(|| missing("blocks"))
    }

    pub fn run(&self) -> Result<&RunSection, Failure> {
        self.run.as_ref().ok_or_else(|| missing("run"))
    }

    pub fn flux(&self) -> Result<&FluxSection, Failure> {
        self.flux.as_ref().ok_or_else(|| missing("flux"))
    }

    pub fn law(&self) -> Result<&InitialLaw, Failure> {
        self.law.as_ref().ok_or_else(|| missing("law"))
    }

    pub fn ensemble(&self) -> Result<&EnsembleSection, Failure> {
        self.ensemble.as_ref().ok_or_else(|| missing("ensemble"))
    }

    pub fn estimate(&self) -> Result<&EstimateSection, Failure> {
        self.estimate.as_ref().ok_or_else(|| missing("estimate"))
    }

    pub fn shock_scan(&self) -> Result<&ShockScanSection, Failure> {
        self.shock_scan
            .as_ref()
            .ok_or_else(|| missing("shock_scan"))
    }

    pub fn probe(&self) -> Result<&ProbeSection, Failure> {
        self.probe.as_ref().ok_or_else(|| missing("probe"))
    }

    pub fn profile(&self) -> Result<&ProfileSection, Failure> {
        self.profile.as_ref().ok_or_else(|| missing("profile"))
    }

    /// The time grid of the `[run]` section.
    pub fn grid(&self) -> Result<Vec<f64>, Failure> {
        let run = self.run()?;
        scenario::time_grid(run.start, run.stop, run.step)
            .map_err(|e| Failure::Config(format!("bad [run] section: {e}")))
    }

    /// Comparison tolerance: flag, then `[run] tolerance`, then the
    /// method default.
    pub fn tolerance(&self, flag: Option<f64>) -> f64 {
        flag.or(self.run.as_ref().and_then(|r| r.tolerance))
            .unwrap_or_else(scenario::default_tolerance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_particle_config_parses() {
        let cfg: RunConfig = toml::from_str(
            "[particles]\n\
             masses = [1.0]\n\
             positions = [0.0]\n\
             velocities = [2.0]\n\
             [run]\n\
             stop = 1.0\n\
             step = 0.5\n",
        )
        .unwrap();
        assert_eq!(cfg.particles().unwrap().masses, vec![1.0]);
        assert_eq!(cfg.grid().unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(cfg.tolerance(None), 1e-10);
        assert_eq!(cfg.tolerance(Some(1e-6)), 1e-6);
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_location() {
        let err = toml::from_str::<RunConfig>("[particles]\nmass = [1.0]\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("mass"), "{msg}");
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn law_section_round_trips() {
        let text = "[law]\n\
                    seed = 42\n\
                    [law.kind.Riemann]\n\
                    left = 2.0\n\
                    right = 1.0\n\
                    position = { Uniform = [-1.0, 1.0] }\n";
        let cfg: RunConfig = toml::from_str(text).unwrap();
        let law = cfg.law().unwrap();
        assert_eq!(law.seed, 42);
        let back = toml::to_string(&cfg).unwrap();
        let again: RunConfig = toml::from_str(&back).unwrap();
        assert_eq!(again.law().unwrap().seed, 42);
    }

    #[test]
    fn missing_sections_name_themselves() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        match cfg.particles() {
            Err(Failure::Config(msg)) => assert!(msg.contains("[particles]")),
            other => panic!("expected config failure, got {other:?}"),
        }
    }
}
