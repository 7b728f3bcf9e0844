use super::config_err;
use crate::config::RunConfig;
use crate::output::Sink;
use crate::{Failure, Invocation};
use conslaw_core::flowmap::inverse_partition;
use conslaw_core::report::{full_precision, Table};

/// Partitions the initial line under the forward map at each grid time and
/// records the body, vacuum, and gap elements.
pub fn run(cfg: &RunConfig, inv: &Invocation) -> Result<String, Failure> {
    let scenario = cfg.particles()?;
    let (p0, u0) = scenario
        .measure_data()
        .map_err(|e| config_err("particles", e))?;
    let grid = cfg.grid()?;

    let blank = String::new;
    let mut table = Table::new(&[
        "t",
        "kind",
        "y_lo",
        "y_hi",
        "x_lo",
        "x_hi",
        "mass",
        "velocity",
        "lo_closed",
        "hi_closed",
    ]);
    let mut last_bodies = 0usize;
    for &t in &grid {
        let part = inverse_partition(&p0, &u0, t)?;
        for body in &part.bodies {
            table.push_row(&[
                full_precision(t),
                "body".into(),
                full_precision(body.y_lo),
                full_precision(body.y_hi),
                full_precision(body.image),
                full_precision(body.image),
                full_precision(body.mass),
                full_precision(body.velocity),
                blank(),
                blank(),
            ]);
        }
        for piece in &part.vacuum {
            table.push_row(&[
                full_precision(t),
                "vacuum".into(),
                full_precision(piece.y_lo),
                full_precision(piece.y_hi),
                full_precision(piece.y_lo + t * piece.velocity),
                full_precision(piece.y_hi + t * piece.velocity),
                full_precision(0.0),
                full_precision(piece.velocity),
                blank(),
                blank(),
            ]);
        }
        for gap in &part.gaps {
            table.push_row(&[
                full_precision(t),
                "gap".into(),
                blank(),
                blank(),
                full_precision(gap.x_lo),
                full_precision(gap.x_hi),
                blank(),
                blank(),
                gap.lo_closed.to_string(),
                gap.hi_closed.to_string(),
            ]);
        }
        last_bodies = part.bodies.len();
    }

    let mut sink = Sink::create(&inv.out)?;
    sink.write("partition.csv", &table.finish())?;
    sink.finish("flowmap", cfg, inv.seed, None, None)?;
    Ok(format!(
        "flowmap: {} grid times, {} body elements at t = {}",
        grid.len(),
        last_bodies,
        grid.last().expect("grid is nonempty")
    ))
}
