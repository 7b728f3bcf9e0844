//! Solver built on a scalar potential of the initial data: for each point
//! `(x, t)` the potential `F(y; x, t)` is a Stieltjes sum over initial
//! atoms, piecewise constant in `y`, and its minimizers identify the
//! initial mass arriving at `x`. The module minimizes the potential
//! exactly by branch enumeration, extracts all cluster positions at once
//! from the lower envelope of the branch lines, traces backward
//! characteristics, and checks the one-sided Lipschitz entropy bound.
//!
//! Two sign conventions coexist. The plain potential sums atom
//! contributions with positive weight on both sides of the origin, which
//! reproduces the classical worked tables; the oriented potential flips
//! the sign of the negative side, as a genuine `int_0^y` would, and is the
//! convention under which minimizers are monotone in `x` and constant
//! along backward characteristics. Both are exposed; envelope extraction
//! and the monotonicity scan use the oriented form.
//!
//! The mass function is anchored at the origin, so initial data must not
//! place an atom exactly at zero; operations that enumerate atoms reject
//! such data.

use crate::error::{Error, Result};
use crate::measures::{AtomicMeasure, StepFunction};
use crate::sticky::ParticleSystem;

/// Plain (both-sides-positive) potential at `(y; x, t)`.
pub fn potential_f(p0: &AtomicMeasure, u0: &StepFunction, y: f64, x: f64, t: f64) -> f64 {
    let m0 = p0.cumulative_from_origin();
    crate::measures::stieltjes_integral(u0, &m0, y, x, t)
}

/// Oriented potential at `(y; x, t)`: the negative side enters with the
/// orientation of the integration range.
pub fn potential_f_oriented(p0: &AtomicMeasure, u0: &StepFunction, y: f64, x: f64, t: f64) -> f64 {
    let m0 = p0.cumulative_from_origin();
    crate::measures::stieltjes_integral_oriented(u0, &m0, y, x, t)
}

/// How the minimum value relates to the potential at the canonical
/// minimizer `y0` (the right endpoint of the leftmost component): either
/// the characteristic-reachability criterion `x <= y0 + t u0(y0)` holds
/// and the minimum counts as attained there, or the potential's right
/// limit at `y0` is recorded instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinAttainment {
    Attained,
    RightLimit { value: f64 },
}

/// Minimum of the potential in `y` at fixed `(x, t)` together with the
/// closure of the set of minimizers.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizerSet {
    /// Minimum value.
    pub v: f64,
    /// Closed intervals (possibly unbounded) whose union is the closure of
    /// the minimizing set; singletons appear as zero-length intervals.
    pub components: Vec<(f64, f64)>,
    /// Least minimizer (`-inf` when the minimizing set is unbounded below).
    pub y_star: f64,
    /// Greatest minimizer (`+inf` when unbounded above).
    pub y_star_upper: f64,
    pub attainment: MinAttainment,
}

/// One constancy interval `(y_lo, y_hi]` of the potential in `y`.
#[derive(Debug, Clone, Copy)]
struct Branch {
    y_lo: f64,
    y_hi: f64,
    value: f64,
    /// Index of the single atom inside `(y_lo, y_hi]`, if any.
    atom: Option<usize>,
}

fn atoms_split(p0: &AtomicMeasure) -> Result<usize> {
    if p0.atoms().iter().any(|&(eta, _)| eta == 0.0) {
        return Err(Error::Invalid(
            "atom at the origin is invisible to the origin-anchored mass function".into(),
        ));
    }
    Ok(p0.atoms().partition_point(|&(eta, _)| eta < 0.0))
}

/// All constancy branches of the potential in `y`, left to right. Branch
/// `j` is the interval between atoms `j-1` and `j` (unbounded at the
/// ends); there are `n + 1` branches for `n` atoms.
fn branches(
    p0: &AtomicMeasure,
    u0: &StepFunction,
    x: f64,
    t: f64,
    oriented: bool,
) -> Result<Vec<Branch>> {
    let negatives = atoms_split(p0)?;
    let atoms = p0.atoms();
    let n = atoms.len();
    let term = |k: usize| -> f64 {
        let (eta, m) = atoms[k];
        m * (t * u0.eval(eta) + eta - x)
    };
    let mut values = vec![0.0; n + 1];
    for j in (0..negatives).rev() {
        let sign = if oriented { -1.0 } else { 1.0 };
        values[j] = values[j + 1] + sign * term(j);
    }
    for j in negatives..n {
        values[j + 1] = values[j] + term(j);
    }
    Ok((0..=n)
        .map(|j| Branch {
            y_lo: if j == 0 {
                f64::NEG_INFINITY
            } else {
                atoms[j - 1].0
            },
            y_hi: if j == n { f64::INFINITY } else { atoms[j].0 },
            value: values[j],
            atom: (j < n).then_some(j),
        })
        .collect())
}

fn minimize(
    p0: &AtomicMeasure,
    u0: &StepFunction,
    x: f64,
    t: f64,
    oriented: bool,
) -> Result<MinimizerSet> {
    let branches = branches(p0, u0, x, t, oriented)?;
    let v = branches
        .iter()
        .map(|b| b.value)
        .fold(f64::INFINITY, f64::min);
    let slack = 1e-12 * v.abs().max(1.0);
    let mut components: Vec<(f64, f64)> = Vec::new();
    let mut first_run_end: Option<usize> = None;
    for (j, b) in branches.iter().enumerate() {
        if b.value > v + slack {
            continue;
        }
        match components.last_mut() {
            Some(last) if last.1 >= b.y_lo => last.1 = b.y_hi,
            _ => components.push((b.y_lo, b.y_hi)),
        }
        if components.len() == 1 {
            first_run_end = Some(j);
        }
    }
    let y_star = components[0].0;
    let y_star_upper = components[components.len() - 1].1;
    let y0 = components[0].1;
    let attainment = if !y0.is_finite() || x <= y0 + t * u0.eval(y0) {
        MinAttainment::Attained
    } else {
        let next = first_run_end.expect("nonempty minimizing set") + 1;
        MinAttainment::RightLimit {
            value: branches[next].value,
        }
    };
    Ok(MinimizerSet {
        v,
        components,
        y_star,
        y_star_upper,
        attainment,
    })
}

/// Exact minimization of the plain potential over `y` at fixed `(x, t)`.
pub fn minimize_f(p0: &AtomicMeasure, u0: &StepFunction, x: f64, t: f64) -> Result<MinimizerSet> {
    minimize(p0, u0, x, t, false)
}

/// Exact minimization of the oriented potential over `y` at fixed
/// `(x, t)`.
pub fn minimize_f_oriented(
    p0: &AtomicMeasure,
    u0: &StepFunction,
    x: f64,
    t: f64,
) -> Result<MinimizerSet> {
    minimize(p0, u0, x, t, true)
}

/// One mass cluster recovered from the branch-line envelope: `first..=last`
/// index the constituent atoms, whose initial positions span `span`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanBody {
    pub position: f64,
    pub velocity: f64,
    pub mass: f64,
    pub first: usize,
    pub last: usize,
    pub span: (f64, f64),
}

/// All cluster positions, velocities and constituent spans at time `t` in
/// one sweep.
///
/// Each branch value is affine in `x`; the minimum over branches is a
/// concave envelope whose breakpoints in `x` are the cluster positions.
/// Equivalently, plotting cumulative signed mass against cumulative
/// ballistic moment per branch and taking the lower convex hull leaves one
/// knot per surviving branch, with chord slopes equal to positions.
pub fn shock_scan(p0: &AtomicMeasure, u0: &StepFunction, t: f64) -> Result<Vec<ScanBody>> {
    let negatives = atoms_split(p0)?;
    let atoms = p0.atoms();
    let n = atoms.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    // cumulative signed mass and ballistic moment, branch by branch
    let mut sigma = vec![0.0; n + 1];
    let mut kappa = vec![0.0; n + 1];
    let moment = |k: usize| -> f64 {
        let (eta, m) = atoms[k];
        m * (eta + t * u0.eval(eta))
    };
    for j in (0..negatives).rev() {
        sigma[j] = sigma[j + 1] - atoms[j].1;
        kappa[j] = kappa[j + 1] - moment(j);
    }
    for j in negatives..n {
        sigma[j + 1] = sigma[j] + atoms[j].1;
        kappa[j + 1] = kappa[j] + moment(j);
    }

    // monotone chain keeping branch indices
    let mut hull: Vec<usize> = Vec::with_capacity(n + 1);
    for j in 0..=n {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let turn = (sigma[b] - sigma[a]) * (kappa[j] - kappa[b])
                - (kappa[b] - kappa[a]) * (sigma[j] - sigma[b]);
            let slack = 1e-12
                * (sigma[j] - sigma[a])
                * kappa[a]
                    .abs()
                    .max(kappa[b].abs())
                    .max(kappa[j].abs())
                    .max(1.0);
            if turn <= slack {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(j);
    }

    let bodies = hull
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let constituents = &atoms[a..b];
            let mass = sigma[b] - sigma[a];
            let momentum: f64 = constituents.iter().map(|&(eta, m)| m * u0.eval(eta)).sum();
            ScanBody {
                position: (kappa[b] - kappa[a]) / mass,
                velocity: momentum / mass,
                mass,
                first: a,
                last: b - 1,
                span: (constituents[0].0, constituents[constituents.len() - 1].0),
            }
        })
        .collect();
    Ok(bodies)
}

/// Straight line through `(x0, t0)` and `(y, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharLine {
    pub x0: f64,
    pub t0: f64,
    pub y: f64,
}

impl CharLine {
    pub fn position(&self, t: f64) -> f64 {
        self.y + (self.x0 - self.y) * t / self.t0
    }

    pub fn slope(&self) -> f64 {
        (self.x0 - self.y) / self.t0
    }
}

/// Left and right backward characteristics from `(x0, t0)` to the initial
/// points `y_lower` and `y_upper`; the two coincide when the endpoints do.
pub fn backward_characteristics(
    x0: f64,
    t0: f64,
    y_lower: f64,
    y_upper: f64,
) -> Result<(CharLine, CharLine)> {
    if !(t0 > 0.0) {
        return Err(Error::Invalid(format!(
            "backward characteristics need positive time, got {t0}"
        )));
    }
    if y_lower > y_upper {
        return Err(Error::Unsorted(format!(
            "characteristic feet out of order: {y_lower} > {y_upper}"
        )));
    }
    Ok((
        CharLine { x0, t0, y: y_lower },
        CharLine { x0, t0, y: y_upper },
    ))
}

/// Worst one-sided Lipschitz violation of a velocity field at time `t`:
/// the maximum over breakpoint pairs `x1 < x2` of
/// `(u(x2) - u(x1)) / (x2 - x1) - 1/t`. Nonpositive means the entropy
/// bound holds; `-inf` when there are not two breakpoints to compare.
pub fn entropy_check(u: &StepFunction, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Invalid(format!(
            "entropy bound needs positive time, got {t}"
        )));
    }
    let bps = u.breakpoints();
    let mut worst = f64::NEG_INFINITY;
    for i in 0..bps.len() {
        for j in i + 1..bps.len() {
            let quotient = (u.eval(bps[j]) - u.eval(bps[i])) / (bps[j] - bps[i]);
            worst = worst.max(quotient - 1.0 / t);
        }
    }
    Ok(worst)
}

/// Right-continuous velocity field of a particle state: each body's
/// velocity from its position up to the next body, extended left with the
/// first body's velocity.
pub fn velocity_field(sys: &ParticleSystem) -> StepFunction {
    let bodies = sys.bodies();
    if bodies.is_empty() {
        return StepFunction::right_continuous(vec![], vec![0.0]).expect("constant field");
    }
    let breakpoints: Vec<f64> = bodies.iter().map(|b| b.position).collect();
    let mut values = Vec::with_capacity(bodies.len() + 1);
    values.push(bodies[0].velocity);
    values.extend(bodies.iter().map(|b| b.velocity));
    StepFunction::right_continuous(breakpoints, values).expect("body positions are ordered")
}

/// Verifies that oriented minimizers move weakly right as `x` does, using
/// one atom-restricted representative interval per grid point: the atoms
/// lying inside minimizing branches. Grid points whose minimizing branches
/// contain no atom impose no constraint.
pub fn monotonicity_scan(
    p0: &AtomicMeasure,
    u0: &StepFunction,
    t: f64,
    xs: &[f64],
) -> Result<bool> {
    let atoms = p0.atoms();
    let mut previous_hi = f64::NEG_INFINITY;
    for &x in xs {
        let branches = branches(p0, u0, x, t, true)?;
        let v = branches
            .iter()
            .map(|b| b.value)
            .fold(f64::INFINITY, f64::min);
        let slack = 1e-12 * v.abs().max(1.0);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for b in &branches {
            if b.value <= v + slack {
                if let Some(k) = b.atom {
                    lo = lo.min(atoms[k].0);
                    hi = hi.max(atoms[k].0);
                }
            }
        }
        if hi == f64::NEG_INFINITY {
            continue;
        }
        if previous_hi > lo + 1e-9 {
            return Ok(false);
        }
        previous_hi = previous_hi.max(hi);
    }
    Ok(true)
}
