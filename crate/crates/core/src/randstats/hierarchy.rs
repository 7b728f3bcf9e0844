//! Monte Carlo residuals of the evolution identities satisfied by front
//! statistics.
//!
//! The single-point identity says that the tail probability of the
//! solution at a fixed level is transported at the chord speed of that
//! level as long as no fronts interact. The pair identity keeps a
//! collision source: the density of fronts with a given state pair
//! changes through transport plus creation and destruction at front
//! coincidences, weighted by the approach speed of the colliding pair.
//!
//! Each realization is reduced to a handful of integer window counts, so
//! the residual of an ensemble is reproducible to the bit for a fixed
//! seed and realization count.

use crate::error::{Error, Result};
use crate::fronttrack::{FluxTable, Front, FrontList};
use rayon::prelude::*;
use serde::Serialize;

/// Ensemble mean of an identity residual and its sampling error.
///
/// `residual = transport - collision`. The transport part estimates the
/// time derivative plus the advective derivative; the collision part
/// estimates the coincidence source terms and is zero for the
/// single-point identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HierarchyEstimate {
    pub residual: f64,
    pub stderr: f64,
    pub transport: f64,
    pub collision: f64,
    pub realizations: usize,
}

fn reduce(samples: &[(f64, f64)]) -> HierarchyEstimate {
    let n = samples.len();
    let nf = n as f64;
    let mut transport = 0.0;
    let mut collision = 0.0;
    for &(tr, co) in samples {
        transport += tr;
        collision += co;
    }
    transport /= nf;
    collision /= nf;
    let residual = transport - collision;
    let stderr = if n < 2 {
        0.0
    } else {
        let mut var = 0.0;
        for &(tr, co) in samples {
            let d = (tr - co) - residual;
            var += d * d;
        }
        (var / (nf - 1.0) / nf).sqrt()
    };
    HierarchyEstimate {
        residual,
        stderr,
        transport,
        collision,
        realizations: n,
    }
}

fn check_common(ensemble: &[FrontList], x: f64, t: f64, dt: f64, window: f64) -> Result<()> {
    if ensemble.is_empty() {
        return Err(Error::Invalid("empty ensemble".into()));
    }
    if !(dt > 0.0 && window > 0.0) {
        return Err(Error::Invalid(format!(
            "dt {dt} and window {window} must be positive"
        )));
    }
    if !x.is_finite() || !t.is_finite() {
        return Err(Error::Invalid("non-finite evaluation point".into()));
    }
    if ensemble.iter().any(|l| l.time() > t - dt) {
        return Err(Error::Invalid(format!(
            "ensemble must not be past the first sample time {}",
            t - dt
        )));
    }
    Ok(())
}

fn count_window(fronts: &[Front], lo: f64, hi: f64, accept: impl Fn(&Front) -> bool) -> i64 {
    fronts
        .iter()
        .filter(|f| f.position >= lo && f.position < hi && accept(f))
        .count() as i64
}

/// Residual of the tail transport identity at level `level`.
///
/// For each realization the tail indicator at `x` is differenced between
/// `t - dt` and `t + dt`, and fronts straddling the level inside the
/// window `[x - window/2, x + window/2)` at time `t` supply the advective
/// derivative at the chord speed of the step from `level` to `level + 1`.
/// The mean vanishes within sampling error while no fronts interact near
/// the evaluation point; a merged front crossing `x` moves at a different
/// speed and leaves a bias.
pub fn hierarchy_residual_first(
    ensemble: &[FrontList],
    table: &FluxTable,
    level: usize,
    x: f64,
    t: f64,
    dt: f64,
    window: f64,
) -> Result<HierarchyEstimate> {
    check_common(ensemble, x, t, dt, window)?;
    if level + 1 >= table.len() {
        return Err(Error::Invalid(format!(
            "level {level} has no state above it on a lattice of {}",
            table.len()
        )));
    }
    let speed = table.chord(level + 1, level);
    let lo = x - window / 2.0;
    let hi = x + window / 2.0;
    let samples: Vec<(f64, f64)> = ensemble
        .par_iter()
        .map(|list| -> Result<(f64, f64)> {
            let before = list.evolve(table, t - dt)?;
            let middle = before.evolve(table, t)?;
            let after = middle.evolve(table, t + dt)?;
            let tail = |l: &FrontList| (l.sample_indices(x).0 > level) as i64;
            let jump = tail(&after) - tail(&before);
            let down = count_window(middle.fronts(), lo, hi, |f| {
                f.left > level && f.right <= level
            });
            let up = count_window(middle.fronts(), lo, hi, |f| {
                f.left <= level && f.right > level
            });
            let transport = jump as f64 / (2.0 * dt) + speed * (up - down) as f64 / window;
            Ok((transport, 0.0))
        })
        .collect::<Result<_>>()?;
    Ok(reduce(&samples))
}

/// Residual of the pair transport identity for fronts jumping from state
/// `pair.0` on the left to `pair.1` on the right.
///
/// The density of such fronts is windowed around `x` at three times for
/// the time derivative and at `x - window`, `x + window` for the space
/// derivative. The collision source counts coincident front pairs closer
/// than `gap` at time `t`: pairs that merge into the tracked front, the
/// tracked front catching its right neighbor, and a left neighbor
/// catching the tracked front, each weighted by the approach speed of
/// the two fronts involved. Receding pairs never collide and are
/// skipped.
///
/// Rising fronts exist only between adjacent lattice states, so a rising
/// `pair` must satisfy `pair.1 == pair.0 + 1`.
#[allow(clippy::too_many_arguments)]
pub fn hierarchy_residual_second(
    ensemble: &[FrontList],
    table: &FluxTable,
    pair: (usize, usize),
    x: f64,
    t: f64,
    dt: f64,
    window: f64,
    gap: f64,
) -> Result<HierarchyEstimate> {
    check_common(ensemble, x, t, dt, window)?;
    if !(gap > 0.0) {
        return Err(Error::Invalid(format!("gap {gap} must be positive")));
    }
    let (u, v) = pair;
    if u >= table.len() || v >= table.len() || u == v {
        return Err(Error::Invalid(format!(
            "state pair ({u}, {v}) is not a jump on a lattice of {}",
            table.len()
        )));
    }
    if u < v && v != u + 1 {
        return Err(Error::Invalid(format!(
            "rising fronts join adjacent states; ({u}, {v}) cannot occur"
        )));
    }
    let speed = table.chord(u, v);
    let m = table.len();
    let lo = x - window / 2.0;
    let hi = x + window / 2.0;
    let pair_scale = 1.0 / (window * gap);
    let samples: Vec<(f64, f64)> = ensemble
        .par_iter()
        .map(|list| -> Result<(f64, f64)> {
            let before = list.evolve(table, t - dt)?;
            let middle = before.evolve(table, t)?;
            let after = middle.evolve(table, t + dt)?;
            let is_pair = |f: &Front| f.left == u && f.right == v;
            let w_before = count_window(before.fronts(), lo, hi, is_pair);
            let w_after = count_window(after.fronts(), lo, hi, is_pair);
            let fronts = middle.fronts();
            let w_left = count_window(fronts, lo - window, hi - window, is_pair);
            let w_right = count_window(fronts, lo + window, hi + window, is_pair);
            let transport = (w_after - w_before) as f64 / (2.0 * dt * window)
                + speed * (w_right - w_left) as f64 / (2.0 * window * window);
            let mut collision = 0.0;
            for (i, first) in fronts.iter().enumerate() {
                for second in &fronts[i + 1..] {
                    let sep = second.position - first.position;
                    if sep > gap {
                        break;
                    }
                    if sep <= 0.0 {
                        continue;
                    }
                    let anchored_first = first.position >= lo && first.position < hi;
                    let anchored_second = second.position >= lo && second.position < hi;
                    if anchored_first && first.left == u && second.right == v {
                        let mid = first.right;
                        if mid == second.left && mid != u && mid != v {
                            let rate = table.chord(u, mid) - table.chord(mid, v);
                            if rate > 0.0 {
                                collision += rate;
                            }
                        }
                    }
                    if anchored_first && is_pair(first) && second.left == v {
                        let w = second.right;
                        if w != v && w < m {
                            let rate = speed - table.chord(v, w);
                            if rate > 0.0 {
                                collision -= rate;
                            }
                        }
                    }
                    if anchored_second && is_pair(second) && first.right == u {
                        let w = first.left;
                        if w != u && w < m {
                            let rate = table.chord(w, u) - speed;
                            if rate > 0.0 {
                                collision -= rate;
                            }
                        }
                    }
                }
            }
            Ok((transport, collision * pair_scale))
        })
        .collect::<Result<_>>()?;
    Ok(reduce(&samples))
}
