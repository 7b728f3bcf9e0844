use super::config_err;
use crate::config::RunConfig;
use crate::output::Sink;
use crate::{Failure, Invocation};
use conslaw_core::hopflax;
use conslaw_core::measures::lower_convex_hull;
use conslaw_core::report::{polyline_svg, Series, Table};

/// Solves by convexification of the shifted cumulative potential and records
/// the hull knots, cluster positions, and vacuum intervals per grid time.
pub fn run(cfg: &RunConfig, inv: &Invocation) -> Result<String, Failure> {
    let scenario = cfg.particles()?;
    let sys0 = scenario.system().map_err(|e| config_err("particles", e))?;
    let grid = cfg.grid()?;

    let mut sink = Sink::create(&inv.out)?;
    let mut potential = Table::new(&["t", "mass", "shifted", "hull"]);
    let mut clusters = Table::new(&["t", "mass_lo", "mass_hi", "position"]);
    let mut vacuum = Table::new(&["t", "mass", "x_lo", "x_hi"]);
    let mut piece_count = 0usize;

    for (idx, &t) in grid.iter().enumerate() {
        let shifted = hopflax::shifted_potential(&sys0, t)?;
        let hull = lower_convex_hull(&shifted);
        for &(m, value) in shifted.knots() {
            potential.push_numbers(&[t, m, value, hull.eval_clamped(m)]);
        }

        let state = hopflax::hull_positions(&sys0, t)?;
        for piece in &state.pieces {
            clusters.push_numbers(&[t, piece.mass_lo, piece.mass_hi, piece.position]);
        }
        for gap in &state.vacuum {
            vacuum.push_numbers(&[t, gap.mass, gap.x_lo, gap.x_hi]);
        }
        piece_count = state.pieces.len();

        let svg = polyline_svg(
            &format!("shifted potential and its convex hull at t = {t}"),
            &[
                Series {
                    label: "shifted",
                    points: shifted.knots(),
                },
                Series {
                    label: "hull",
                    points: hull.knots(),
                },
            ],
        );
        sink.write(&format!("potential_{idx:03}.svg"), &svg)?;
    }

    sink.write("potential.csv", &potential.finish())?;
    sink.write("clusters.csv", &clusters.finish())?;
    sink.write("vacuum.csv", &vacuum.finish())?;
    sink.finish("hopflax", cfg, inv.seed, None, None)?;

    let stop = *grid.last().expect("grid is nonempty");
    Ok(format!(
        "hopflax: {} grid times, {} hull pieces at t = {}",
        grid.len(),
        piece_count,
        stop
    ))
}
