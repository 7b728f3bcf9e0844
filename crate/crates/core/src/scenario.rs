//! Serializable descriptions of initial data, shared by the command-line
//! driver, the benchmarks and the test suites.

use crate::error::{Error, Result};
use crate::fronttrack::{FluxTable, FrontList};
use crate::measures::{AtomicMeasure, StepFunction};
use crate::sticky::ParticleSystem;
use serde::{Deserialize, Serialize};

/// Discrete adhesion data: one entry per particle, plus the velocity of
/// the massless medium left of the first particle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleScenario {
    pub masses: Vec<f64>,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
    #[serde(default)]
    pub background_velocity: f64,
}

impl ParticleScenario {
    pub fn system(&self) -> Result<ParticleSystem> {
        ParticleSystem::new(&self.masses, &self.positions, &self.velocities)
    }

    /// The same data as an atomic mass measure and a right-continuous
    /// velocity field whose value at each atom is that atom's velocity.
    pub fn measure_data(&self) -> Result<(AtomicMeasure, StepFunction)> {
        let atoms = self
            .positions
            .iter()
            .zip(&self.masses)
            .map(|(&x, &m)| (x, m))
            .collect();
        let p0 = AtomicMeasure::new(atoms)?;
        let mut values = Vec::with_capacity(self.velocities.len() + 1);
        values.push(self.background_velocity);
        values.extend_from_slice(&self.velocities);
        let u0 = StepFunction::right_continuous(self.positions.clone(), values)?;
        Ok((p0, u0))
    }
}

/// The worked four-particle configuration used as the common fixture
/// across all solvers: total mass one, first collision at `(-1, 1)`.
pub fn four_particles() -> ParticleScenario {
    ParticleScenario {
        masses: vec![0.25, 0.25, 1.0 / 3.0, 1.0 / 6.0],
        positions: vec![-3.0, -2.0, 1.0, 3.0],
        velocities: vec![2.0, 1.0, -0.5, 1.0],
        background_velocity: 0.0,
    }
}

/// Piecewise-constant initial data on a lattice of flux states: the flux
/// table and the block profile, with `states` holding one lattice index
/// more than `positions`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockScenario {
    pub flux_states: Vec<f64>,
    pub flux_values: Vec<f64>,
    pub positions: Vec<f64>,
    pub states: Vec<usize>,
}

impl BlockScenario {
    pub fn table(&self) -> Result<FluxTable> {
        FluxTable::new(self.flux_states.clone(), self.flux_values.clone())
    }

    pub fn initial_fronts(&self) -> Result<FrontList> {
        FrontList::from_profile(&self.table()?, &self.positions, &self.states)
    }
}

/// Tolerance with a sensible default for exact-method comparisons.
pub fn default_tolerance() -> f64 {
    1e-10
}

/// Evenly spaced times from `start` through `stop` inclusive within a
/// relative slack.
pub fn time_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) {
        return Err(Error::Invalid(format!(
            "bad time grid: start {start}, stop {stop}, step {step}"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}
