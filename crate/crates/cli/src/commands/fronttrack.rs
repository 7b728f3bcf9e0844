use super::config_err;
use crate::config::RunConfig;
use crate::output::Sink;
use crate::{Failure, Invocation};
use conslaw_core::report::{full_precision, Table};

/// Tracks fronts of a piecewise-constant profile under a piecewise-linear
/// convex flux and records every front at every grid time.
pub fn run(cfg: &RunConfig, inv: &Invocation) -> Result<String, Failure> {
    let blocks = cfg.blocks()?;
    let table = blocks.table().map_err(|e| config_err("blocks", e))?;
    let list0 = blocks
        .initial_fronts()
        .map_err(|e| config_err("blocks", e))?;
    let grid = cfg.grid()?;

    let mut worldlines = Table::new(&["t", "x", "left", "right", "speed"]);
    let mut last_count = 0usize;
    for &t in &grid {
        let list = list0.evolve(&table, t)?;
        for front in list.fronts() {
            worldlines.push_row(&[
                full_precision(t),
                full_precision(front.position),
                front.left.to_string(),
                front.right.to_string(),
                full_precision(front.speed),
            ]);
        }
        last_count = list.fronts().len();
    }

    let mut sink = Sink::create(&inv.out)?;
    sink.write("worldlines.csv", &worldlines.finish())?;
    sink.finish("fronttrack", cfg, inv.seed, None, None)?;
    Ok(format!(
        "fronttrack: {} fronts remain at t = {}",
        last_count,
        grid.last().expect("grid is nonempty")
    ))
}
