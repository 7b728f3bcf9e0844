use super::{build_pool, resolved_law};
use crate::config::RunConfig;
use crate::output::Sink;
use crate::{Failure, Invocation};
use conslaw_core::randstats::{sample_psi_stream, scan_shocks, ShockSample};
use conslaw_core::report::{full_precision, histogram, histogram_svg, Histogram, Table};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Serialize)]
struct ScanSummary {
    paths: usize,
    shocks: usize,
    strength: Histogram,
    wavelength: Histogram,
}

/// Samples potential paths, locates every shock in the scan window by
/// parabola contacts, and histograms shock strength and wavelength.
pub fn run(cfg: &RunConfig, inv: &Invocation) -> Result<String, Failure> {
    build_pool(inv.workers);
    let law = resolved_law(cfg, inv)?;
    let scan = *cfg.shock_scan()?;

    let per_path: Vec<Vec<ShockSample>> = (0..scan.paths)
        .into_par_iter()
        .map(|i| {
            let psi = sample_psi_stream(&law, scan.domain, i as u64)?;
            scan_shocks(&psi, scan.time, scan.window, scan.probes)
        })
        .collect::<conslaw_core::Result<_>>()?;

    let mut table = Table::new(&["path", "x_star", "xi_minus", "xi_plus", "mu", "nu"]);
    let mut mu = Vec::new();
    let mut nu = Vec::new();
    for (i, shocks) in per_path.iter().enumerate() {
        for s in shocks {
            table.push_row(&[
                i.to_string(),
                full_precision(s.x_star),
                full_precision(s.xi_minus),
                full_precision(s.xi_plus),
                full_precision(s.mu),
                full_precision(s.nu),
            ]);
            mu.push(s.mu);
            nu.push(s.nu);
        }
    }

    let range = |values: &[f64]| {
        let top = values.iter().copied().fold(0.0f64, f64::max);
        (0.0, if top > 0.0 { top * 1.05 } else { 1.0 })
    };
    let mu_hist = histogram(&mu, scan.bins, range(&mu))?;
    let nu_hist = histogram(&nu, scan.bins, range(&nu))?;

    let mut sink = Sink::create(&inv.out)?;
    sink.write("shocks.csv", &table.finish())?;
    sink.write("mu_hist.csv", &mu_hist.to_csv())?;
    sink.write("mu_hist.svg", &histogram_svg("shock strength", &mu_hist))?;
    sink.write("nu_hist.csv", &nu_hist.to_csv())?;
    sink.write("nu_hist.svg", &histogram_svg("shock wavelength", &nu_hist))?;
    let summary = ScanSummary {
        paths: scan.paths,
        shocks: mu.len(),
        strength: mu_hist,
        wavelength: nu_hist,
    };
    sink.write_json("summary.json", &summary)?;
    sink.finish("fm-shocks", cfg, Some(law.seed), inv.workers, None)?;
    Ok(format!(
        "fm-shocks: {} shocks across {} paths at t = {}",
        summary.shocks, scan.paths, scan.time
    ))
}
