use super::config_err;
use crate::config::RunConfig;
use crate::output::Sink;
use crate::{Failure, Invocation};
use conslaw_core::report::{full_precision, Table};

/// Runs the adhesion dynamics over the configured time grid and records the
/// body worldlines together with the collision log.
pub fn run(cfg: &RunConfig, inv: &Invocation) -> Result<String, Failure> {
    let scenario = cfg.particles()?;
    let sys0 = scenario.system().map_err(|e| config_err("particles", e))?;
    let grid = cfg.grid()?;
    let stop = *grid.last().expect("grid is nonempty");

    let mut world = Table::new(&["t", "x", "mass", "velocity", "cluster_id"]);
    for &t in &grid {
        let sys = sys0.evolve(t)?;
        for body in sys.bodies() {
            world.push_row(&[
                full_precision(t),
                full_precision(body.position),
                full_precision(body.mass),
                full_precision(body.velocity),
                body.first.to_string(),
            ]);
        }
    }

    let (final_sys, events) = sys0.evolve_logged(stop)?;
    let mut collisions = Table::new(&["t", "x", "first", "last"]);
    for ev in &events {
        collisions.push_row(&[
            full_precision(ev.time),
            full_precision(ev.position),
            ev.first.to_string(),
            ev.last.to_string(),
        ]);
    }

    let mut sink = Sink::create(&inv.out)?;
    sink.write("worldlines.csv", &world.finish())?;
    sink.write("collisions.csv", &collisions.finish())?;
    sink.finish("sticky", cfg, inv.seed, None, None)?;
    Ok(format!(
        "sticky: {} collisions through t = {}, {} bodies remain",
        events.len(),
        stop,
        final_sys.len()
    ))
}
