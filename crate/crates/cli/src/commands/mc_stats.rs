use super::{build_pool, config_err, resolved_law};
use crate::config::{EstimateKindConfig, HierarchyKindConfig, RunConfig};
use crate::output::Sink;
use crate::{Failure, Invocation};
use conslaw_core::fronttrack::FluxTable;
use conslaw_core::randstats::{
    estimate_p, estimate_pair_coincidence, hierarchy_residual_first, hierarchy_residual_second,
    EnsembleRunner, EstimateKind, HierarchyEstimate,
};
use conslaw_core::report::{full_precision, Table};
use serde::Serialize;

#[derive(Serialize)]
struct HierarchyRow {
    x: f64,
    #[serde(flatten)]
    estimate: HierarchyEstimate,
}

#[derive(Serialize)]
struct HierarchyReport {
    kind: String,
    rows: Vec<HierarchyRow>,
}

fn need(section: &str, field: &str, value: Option<f64>) -> Result<f64, Failure> {
    value.ok_or_else(|| Failure::Config(format!("bad [{section}] section: needs {field}")))
}

/// Draws the ensemble, evolves it with front tracking, and estimates the
/// configured correlation functions and hierarchy residuals.
pub fn run(cfg: &RunConfig, inv: &Invocation) -> Result<String, Failure> {
    build_pool(inv.workers);
    let law = resolved_law(cfg, inv)?;
    let flux = cfg.flux()?;
    let table = FluxTable::new(flux.states.clone(), flux.values.clone())
        .map_err(|e| config_err("flux", e))?;
    let ens = cfg.ensemble()?;
    let runner = EnsembleRunner {
        law: law.clone(),
        table: table.clone(),
        domain: ens.domain,
        size: ens.size,
    };
    let lists = runner.evolved(ens.time)?;

    let est = cfg.estimate()?;
    let estimate = match est.kind {
        EstimateKindConfig::P1 => estimate_p(&lists, &table, &est.points, EstimateKind::P1, 0.0)?,
        EstimateKindConfig::FrontDensity => {
            let w = need("estimate", "window", est.window)?;
            estimate_p(&lists, &table, &est.points, EstimateKind::P2Density, w)?
        }
        EstimateKindConfig::PairCoincidence => {
            let w = need("estimate", "window", est.window)?;
            let g = need("estimate", "gap", est.gap)?;
            estimate_pair_coincidence(&lists, &table, &est.points, w, g)?
        }
    };

    let mut csv = Table::new(&["x", "bucket", "count", "value", "stderr"]);
    for (g, &x) in estimate.grid.iter().enumerate() {
        for b in 0..estimate.counts[g].len() {
            csv.push_row(&[
                full_precision(x),
                b.to_string(),
                estimate.counts[g][b].to_string(),
                full_precision(estimate.values[g][b]),
                full_precision(estimate.stderr[g][b]),
            ]);
        }
    }

    let mut sink = Sink::create(&inv.out)?;
    sink.write("estimates.csv", &csv.finish())?;
    sink.write_json("estimates.json", &estimate)?;

    let mut hierarchy_note = String::new();
    if let Some(h) = &cfg.hierarchy {
        let mut rows = Vec::with_capacity(h.points.len());
        let kind = match h.kind {
            HierarchyKindConfig::First => {
                let level = h.level.ok_or_else(|| {
                    Failure::Config("bad [hierarchy] section: first kind needs level".into())
                })?;
                for &x in &h.points {
                    let e =
                        hierarchy_residual_first(&lists, &table, level, x, h.time, h.dt, h.window)?;
                    rows.push(HierarchyRow { x, estimate: e });
                }
                "first".to_string()
            }
            HierarchyKindConfig::Second => {
                let pair = h.pair.ok_or_else(|| {
                    Failure::Config("bad [hierarchy] section: second kind needs pair".into())
                })?;
                let gap = need("hierarchy", "gap", h.gap)?;
                for &x in &h.points {
                    let e = hierarchy_residual_second(
                        &lists, &table, pair, x, h.time, h.dt, h.window, gap,
                    )?;
                    rows.push(HierarchyRow { x, estimate: e });
                }
                "second".to_string()
            }
        };
        let mut hcsv = Table::new(&["x", "residual", "stderr", "transport", "collision"]);
        let mut worst = 0.0f64;
        for row in &rows {
            hcsv.push_numbers(&[
                row.x,
                row.estimate.residual,
                row.estimate.stderr,
                row.estimate.transport,
                row.estimate.collision,
            ]);
            if row.estimate.stderr > 0.0 {
                worst = worst.max(row.estimate.residual.abs() / row.estimate.stderr);
            }
        }
        sink.write("hierarchy.csv", &hcsv.finish())?;
        sink.write_json("hierarchy.json", &HierarchyReport { kind, rows })?;
        hierarchy_note = format!(", hierarchy residual up to {worst:.2} stderr");
    }

    sink.finish("mc-stats", cfg, Some(law.seed), inv.workers, None)?;
    Ok(format!(
        "mc-stats: {} realizations at t = {}, {} grid points{hierarchy_note}",
        ens.size,
        ens.time,
        estimate.grid.len()
    ))
}
