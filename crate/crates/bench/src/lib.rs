//! Deterministic fixture builders of scalable size for the solver benches.

use conslaw_core::fronttrack::{FluxTable, FrontList};
use conslaw_core::scenario::ParticleScenario;
use conslaw_core::sticky::ParticleSystem;

/// Low-discrepancy value in [0, 1): fractional part of `k` times the
/// golden ratio.
pub fn golden(k: usize) -> f64 {
    (k as f64 * 0.618_033_988_749_894_9).fract()
}

/// `n` equal-mass particles on a jittered unit grid with bounded
/// quasi-random velocities; collisions happen at many distinct times.
pub fn jittered_scenario(n: usize) -> ParticleScenario {
    ParticleScenario {
        masses: vec![1.0 / n as f64; n],
        positions: (0..n).map(|k| k as f64 + 0.1 + 0.8 * golden(k)).collect(),
        velocities: (0..n).map(|k| 4.0 * golden(k + 7) - 2.0).collect(),
        background_velocity: 0.0,
    }
}

pub fn jittered_system(n: usize) -> ParticleSystem {
    jittered_scenario(n).system().expect("valid scenario")
}

/// A quadratic flux sampled on an `m`-state lattice together with `n`
/// quasi-random blocks; evolving it resolves many front interactions.
pub fn staircase_fronts(m: usize, n: usize) -> (FluxTable, FrontList) {
    let states: Vec<f64> = (0..m).map(|k| k as f64).collect();
    let values: Vec<f64> = states.iter().map(|u| 0.5 * u * u).collect();
    let table = FluxTable::new(states, values).expect("convex lattice");
    let positions: Vec<f64> = (0..n).map(|k| 0.5 * k as f64).collect();
    let mut indices: Vec<usize> = (0..=n).map(|k| (m as f64 * golden(k)) as usize).collect();
    for i in &mut indices {
        *i = (*i).min(m - 1);
    }
    let fronts = FrontList::from_profile(&table, &positions, &indices).expect("valid profile");
    (table, fronts)
}
