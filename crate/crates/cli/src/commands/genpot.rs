use super::config_err;
use crate::config::RunConfig;
use crate::output::Sink;
use crate::{Failure, Invocation};
use conslaw_core::genpot::{minimize_f, potential_f};
use conslaw_core::report::{polyline_svg, Series, Table};

/// Minimizes the generalized potential along a spatial profile and samples
/// its branch structure at the probe point.
pub fn run(cfg: &RunConfig, inv: &Invocation) -> Result<String, Failure> {
    let scenario = cfg.particles()?;
    let (p0, u0) = scenario
        .measure_data()
        .map_err(|e| config_err("particles", e))?;
    let probe = cfg.probe()?;
    let profile = cfg.profile()?;
    if profile.points < 2 {
        return Err(Failure::Config(
            "bad [profile] section: needs at least two points".into(),
        ));
    }
    if !(profile.lo < profile.hi) {
        return Err(Failure::Config(
            "bad [profile] section: lo must be below hi".into(),
        ));
    }

    let mut profile_csv = Table::new(&["x", "v", "y_star", "y_star_upper"]);
    let step = (profile.hi - profile.lo) / (profile.points - 1) as f64;
    for k in 0..profile.points {
        let x = profile.lo + k as f64 * step;
        let set = minimize_f(&p0, &u0, x, probe.time)?;
        profile_csv.push_numbers(&[x, set.v, set.y_star, set.y_star_upper]);
    }

    let atoms = p0.atoms();
    let y_lo = atoms.first().map_or(-1.0, |a| a.0);
    let y_hi = atoms.last().map_or(1.0, |a| a.0);
    let pad = 0.5 * (y_hi - y_lo).max(1.0);
    let (y_lo, y_hi) = (y_lo - pad, y_hi + pad);
    let samples = 400usize;
    let mut branch_points = Vec::with_capacity(samples + 1);
    let mut branches_csv = Table::new(&["y", "potential"]);
    for k in 0..=samples {
        let y = y_lo + (y_hi - y_lo) * k as f64 / samples as f64;
        let value = potential_f(&p0, &u0, y, probe.x, probe.time);
        branch_points.push((y, value));
        branches_csv.push_numbers(&[y, value]);
    }
    let probe_set = minimize_f(&p0, &u0, probe.x, probe.time)?;
    let markers = [
        (probe_set.y_star, probe_set.v),
        (probe_set.y_star_upper, probe_set.v),
    ];
    let marker_points: Vec<(f64, f64)> = markers
        .iter()
        .copied()
        .filter(|p| p.0.is_finite())
        .collect();
    let svg = polyline_svg(
        &format!(
            "generalized potential at x = {}, t = {}",
            probe.x, probe.time
        ),
        &[
            Series {
                label: "potential",
                points: &branch_points,
            },
            Series {
                label: "minimizers",
                points: &marker_points,
            },
        ],
    );

    let mut sink = Sink::create(&inv.out)?;
    sink.write("profile.csv", &profile_csv.finish())?;
    sink.write("branches.csv", &branches_csv.finish())?;
    sink.write("branches.svg", &svg)?;
    sink.finish("genpot", cfg, inv.seed, None, None)?;
    Ok(format!(
        "genpot: {} profile points at t = {}, minimum {} at y in [{}, {}]",
        profile.points, probe.time, probe_set.v, probe_set.y_star, probe_set.y_star_upper
    ))
}
