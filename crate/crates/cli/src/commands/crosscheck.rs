use super::config_err;
use crate::config::RunConfig;
use crate::output::Sink;
use crate::{Failure, Invocation};
use conslaw_core::report::{full_precision, Table};
use conslaw_core::{flowmap, genpot, hopflax};

const METHODS: [&str; 4] = ["sticky", "hull", "flow", "scan"];

struct MethodState {
    positions: Vec<f64>,
    velocities: Vec<f64>,
}

/// Runs all four exact solvers on the particle scenario at each grid time
/// and reports the maximum pairwise discrepancy in cluster positions and
/// velocities.
pub fn run(cfg: &RunConfig, inv: &Invocation) -> Result<String, Failure> {
    let scenario = cfg.particles()?;
    let sys0 = scenario.system().map_err(|e| config_err("particles", e))?;
    let (p0, u0) = scenario
        .measure_data()
        .map_err(|e| config_err("particles", e))?;
    let grid = cfg.grid()?;
    let tolerance = cfg.tolerance(inv.tolerance);

    let momentum = hopflax::cumulative_flux(&hopflax::velocity_profile(&sys0)?, sys0.total_mass())?;

    let mut table = Table::new(&[
        "t", "cluster", "sticky_x", "hull_x", "flow_x", "scan_x", "sticky_v", "hull_v", "flow_v",
        "scan_v",
    ]);
    let mut summary = Table::new(&["t", "clusters", "max_dx", "max_dv"]);
    let mut max_dx = 0.0f64;
    let mut max_dv = 0.0f64;
    let mut mismatch: Option<String> = None;

    'times: for &t in &grid {
        let sticky_sys = sys0.evolve(t)?;
        let sticky = MethodState {
            positions: sticky_sys.bodies().iter().map(|b| b.position).collect(),
            velocities: sticky_sys.bodies().iter().map(|b| b.velocity).collect(),
        };

        let hull_state = hopflax::hull_positions(&sys0, t)?;
        let hull = MethodState {
            positions: hull_state.pieces.iter().map(|p| p.position).collect(),
            velocities: hull_state
                .pieces
                .iter()
                .map(|p| {
                    (momentum.eval_clamped(p.mass_hi) - momentum.eval_clamped(p.mass_lo))
                        / (p.mass_hi - p.mass_lo)
                })
                .collect(),
        };

        let partition = flowmap::inverse_partition(&p0, &u0, t)?;
        let flow = MethodState {
            positions: partition.bodies.iter().map(|b| b.image).collect(),
            velocities: partition.bodies.iter().map(|b| b.velocity).collect(),
        };

        let scan_bodies = genpot::shock_scan(&p0, &u0, t)?;
        let scan = MethodState {
            positions: scan_bodies.iter().map(|b| b.position).collect(),
            velocities: scan_bodies.iter().map(|b| b.velocity).collect(),
        };

        let states = [sticky, hull, flow, scan];
        let n = states[0].positions.len();
        for (name, state) in METHODS.iter().zip(&states) {
            if state.positions.len() != n {
                mismatch = Some(format!(
                    "at t = {t}: {name} finds {} clusters where sticky finds {n}",
                    state.positions.len()
                ));
                break 'times;
            }
        }

        let mut dx_t = 0.0f64;
        let mut dv_t = 0.0f64;
        for k in 0..n {
            for a in 0..states.len() {
                for b in a + 1..states.len() {
                    dx_t = dx_t.max((states[a].positions[k] - states[b].positions[k]).abs());
                    dv_t = dv_t.max((states[a].velocities[k] - states[b].velocities[k]).abs());
                }
            }
            table.push_numbers(&[
                t,
                k as f64,
                states[0].positions[k],
                states[1].positions[k],
                states[2].positions[k],
                states[3].positions[k],
                states[0].velocities[k],
                states[1].velocities[k],
                states[2].velocities[k],
                states[3].velocities[k],
            ]);
        }
        summary.push_numbers(&[t, n as f64, dx_t, dv_t]);
        max_dx = max_dx.max(dx_t);
        max_dv = max_dv.max(dv_t);
    }

    let pass = mismatch.is_none() && max_dx <= tolerance && max_dv <= tolerance;
    let report = serde_json::json!({
        "tolerance": tolerance,
        "max_position_discrepancy": max_dx,
        "max_velocity_discrepancy": max_dv,
        "cluster_counts_agree": mismatch.is_none(),
        "pass": pass,
    });

    let mut sink = Sink::create(&inv.out)?;
    sink.write("crosscheck.csv", &table.finish())?;
    sink.write("discrepancy.csv", &summary.finish())?;
    sink.write_json("report.json", &report)?;
    sink.finish("crosscheck", cfg, inv.seed, None, Some(tolerance))?;

    if let Some(msg) = mismatch {
        return Err(Failure::Tolerance(msg));
    }
    let line = format!(
        "crosscheck: max |dx| = {}, max |dv| = {} over {} times (tolerance {})",
        full_precision(max_dx),
        full_precision(max_dv),
        grid.len(),
        tolerance
    );
    if pass {
        Ok(line)
    } else {
        Err(Failure::Tolerance(line))
    }
}
