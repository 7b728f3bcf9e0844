//! One- and two-point correlation estimates over a front-tracking ensemble.
//!
//! All counting is integer-exact per realization, so estimates do not
//! depend on summation order and repeated runs with the same ensemble are
//! identical to the bit.

use crate::error::{Error, Result};
use crate::fronttrack::{FluxTable, FrontList};
use serde::Serialize;

/// What the buckets of an estimate mean.
///
/// * `P1`: probability that the left limit of the solution at a grid point
///   is a given lattice state; one bucket per state.
/// * `P2Density`: spatial density of fronts with a given (left, right)
///   state pair inside `[x, x + window)`; buckets are state pairs flattened
///   as `left * m + right`.
/// * `F1`: the same counting as `P2Density`, read as the density of a
///   single front carrying the pair.
/// * `F2`: density of ordered front pairs with the first front in
///   `[x, x + window)` and the second at most `gap` to its right; buckets
///   are state quadruples flattened as
///   `((l1 * m + r1) * m + l2) * m + r2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EstimateKind {
    P1,
    P2Density,
    F1,
    F2,
}

/// Correlation estimate on a grid of observation points: raw integer
/// counts per bucket, the normalized values, and their standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NPointEstimate {
    pub kind: EstimateKind,
    pub grid: Vec<f64>,
    pub states: Vec<f64>,
    pub window: f64,
    pub gap: f64,
    pub realizations: usize,
    pub counts: Vec<Vec<u64>>,
    pub values: Vec<Vec<f64>>,
    pub stderr: Vec<Vec<f64>>,
}

fn check_ensemble(ensemble: &[FrontList], grid: &[f64]) -> Result<()> {
    if ensemble.is_empty() {
        return Err(Error::Invalid("empty ensemble".into()));
    }
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid("grid must be finite and non-empty".into()));
    }
    let t = ensemble[0].time();
    if ensemble.iter().any(|l| l.time() != t) {
        return Err(Error::Invalid(
            "ensemble members are at different times".into(),
        ));
    }
    Ok(())
}

/// Normalizes per-realization integer counts into a mean value and the
/// standard error of that mean.
fn normalize(sum: u64, sumsq: u64, n: usize, scale: f64) -> (f64, f64) {
    let nf = n as f64;
    let mean = sum as f64 / nf;
    let value = mean * scale;
    if n < 2 {
        return (value, 0.0);
    }
    let var = (sumsq as f64 - nf * mean * mean) / (nf - 1.0);
    (value, scale * (var.max(0.0) / nf).sqrt())
}

/// Estimates a correlation function over the ensemble, which must sit at a
/// common time. `window` is ignored for `P1`; `F2` takes its pair
/// separation from [`estimate_pair_coincidence`].
pub fn estimate_p(
    ensemble: &[FrontList],
    table: &FluxTable,
    grid: &[f64],
    kind: EstimateKind,
    window: f64,
) -> Result<NPointEstimate> {
    check_ensemble(ensemble, grid)?;
    match kind {
        EstimateKind::P1 => estimate_p1(ensemble, table, grid),
        EstimateKind::P2Density | EstimateKind::F1 => {
            if !(window > 0.0) {
                return Err(Error::Invalid(format!("window {window} must be positive")));
            }
            estimate_front_density(ensemble, table, grid, kind, window)
        }
        EstimateKind::F2 => Err(Error::Invalid(
            "pair coincidence needs a separation; use estimate_pair_coincidence".into(),
        )),
    }
}

fn estimate_p1(ensemble: &[FrontList], table: &FluxTable, grid: &[f64]) -> Result<NPointEstimate> {
    let m = table.len();
    let n = ensemble.len();
    let mut counts = vec![vec![0u64; m]; grid.len()];
    for list in ensemble {
        for (g, &x) in grid.iter().enumerate() {
            let (left, _) = list.sample_indices(x);
            counts[g][left] += 1;
        }
    }
    let mut values = Vec::with_capacity(grid.len());
    let mut stderr = Vec::with_capacity(grid.len());
    for row in &counts {
        debug_assert_eq!(row.iter().sum::<u64>(), n as u64);
        let mut v = Vec::with_capacity(m);
        let mut s = Vec::with_capacity(m);
        for &c in row {
            let p = c as f64 / n as f64;
            v.push(p);
            s.push((p * (1.0 - p) / n as f64).sqrt());
        }
        values.push(v);
        stderr.push(s);
    }
    Ok(NPointEstimate {
        kind: EstimateKind::P1,
        grid: grid.to_vec(),
        states: table.states().to_vec(),
        window: 0.0,
        gap: 0.0,
        realizations: n,
        counts,
        values,
        stderr,
    })
}

fn estimate_front_density(
    ensemble: &[FrontList],
    table: &FluxTable,
    grid: &[f64],
    kind: EstimateKind,
    window: f64,
) -> Result<NPointEstimate> {
    let m = table.len();
    let n = ensemble.len();
    let buckets = m * m;
    let mut counts = vec![vec![0u64; buckets]; grid.len()];
    let mut sumsq = vec![vec![0u64; buckets]; grid.len()];
    let mut local = vec![0u64; buckets];
    let mut touched = Vec::with_capacity(8);
    for list in ensemble {
        for (g, &x) in grid.iter().enumerate() {
            for f in list.fronts() {
                if f.position >= x && f.position < x + window {
                    let b = f.left * m + f.right;
                    if local[b] == 0 {
                        touched.push(b);
                    }
                    local[b] += 1;
                }
            }
            for &b in &touched {
                counts[g][b] += local[b];
                sumsq[g][b] += local[b] * local[b];
                local[b] = 0;
            }
            touched.clear();
        }
    }
    let scale = 1.0 / window;
    let mut values = Vec::with_capacity(grid.len());
    let mut stderr = Vec::with_capacity(grid.len());
    for (row, sq) in counts.iter().zip(&sumsq) {
        let mut v = Vec::with_capacity(buckets);
        let mut s = Vec::with_capacity(buckets);
        for (&c, &c2) in row.iter().zip(sq) {
            let (value, err) = normalize(c, c2, n, scale);
            v.push(value);
            s.push(err);
        }
        values.push(v);
        stderr.push(s);
    }
    Ok(NPointEstimate {
        kind,
        grid: grid.to_vec(),
        states: table.states().to_vec(),
        window,
        gap: 0.0,
        realizations: n,
        counts,
        values,
        stderr,
    })
}

/// Density of ordered front pairs: the first front falls in
/// `[x, x + window)` and the second follows within `(0, gap]`. Buckets
/// hold the two state pairs; values are normalized by `window * gap`.
pub fn estimate_pair_coincidence(
    ensemble: &[FrontList],
    table: &FluxTable,
    grid: &[f64],
    window: f64,
    gap: f64,
) -> Result<NPointEstimate> {
    check_ensemble(ensemble, grid)?;
    if !(window > 0.0 && gap > 0.0) {
        return Err(Error::Invalid(format!(
            "window {window} and gap {gap} must be positive"
        )));
    }
    let m = table.len();
    let n = ensemble.len();
    let buckets = m * m * m * m;
    let mut counts = vec![vec![0u64; buckets]; grid.len()];
    let mut sumsq = vec![vec![0u64; buckets]; grid.len()];
    let mut local = vec![0u64; buckets];
    let mut touched = Vec::with_capacity(8);
    for list in ensemble {
        let fronts = list.fronts();
        for (g, &x) in grid.iter().enumerate() {
            for (i, f) in fronts.iter().enumerate() {
                if !(f.position >= x && f.position < x + window) {
                    continue;
                }
                for second in &fronts[i + 1..] {
                    let d = second.position - f.position;
                    if d > gap {
                        break;
                    }
                    if d <= 0.0 {
                        continue;
                    }
                    let b = ((f.left * m + f.right) * m + second.left) * m + second.right;
                    if local[b] == 0 {
                        touched.push(b);
                    }
                    local[b] += 1;
                }
            }
            for &b in &touched {
                counts[g][b] += local[b];
                sumsq[g][b] += local[b] * local[b];
                local[b] = 0;
            }
            touched.clear();
        }
    }
    let scale = 1.0 / (window * gap);
    let mut values = Vec::with_capacity(grid.len());
    let mut stderr = Vec::with_capacity(grid.len());
    for (row, sq) in counts.iter().zip(&sumsq) {
        let mut v = Vec::with_capacity(buckets);
        let mut s = Vec::with_capacity(buckets);
        for (&c, &c2) in row.iter().zip(sq) {
            let (value, err) = normalize(c, c2, n, scale);
            v.push(value);
            s.push(err);
        }
        values.push(v);
        stderr.push(s);
    }
    Ok(NPointEstimate {
        kind: EstimateKind::F2,
        grid: grid.to_vec(),
        states: table.states().to_vec(),
        window,
        gap,
        realizations: n,
        counts,
        values,
        stderr,
    })
}
