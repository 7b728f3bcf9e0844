//! Variational solver in mass coordinates: builds the velocity profile
//! `a(m)`, its antiderivative flux `A(m)` and the initial-position potential
//! `phi0(m)`, then reads the state at time `t` off the lower convex hull of
//! `phi0 + t A`. Slopes of the hull's maximal linear pieces are cluster
//! positions; slope jumps at hull kinks are vacuum intervals of the line.
//!
//! The module also evaluates the conjugate (Hopf-form) space potential and
//! certifies the viscosity inequalities of the cumulative-mass equation at
//! every kink numerically.

use crate::error::{Error, Result};
use crate::measures::{lower_convex_hull, positive_part_sum, PiecewiseLinear, Side, StepFunction};
use crate::sticky::ParticleSystem;

/// Minimum slope jump treated as a genuine vacuum interval rather than
/// rounding noise between collinear hull pieces.
const VACUUM_SLACK: f64 = 1e-9;

fn step_over_mass(sys: &ParticleSystem, field: impl Fn(usize) -> f64) -> Result<StepFunction> {
    if sys.is_empty() {
        return Err(Error::Invalid("empty particle system".into()));
    }
    let cumulative = sys.cumulative_mass();
    let breakpoints = cumulative[1..sys.len()].to_vec();
    let values: Vec<f64> = (0..sys.len()).map(field).collect();
    let sides = vec![Side::Left; breakpoints.len()];
    StepFunction::with_sides(breakpoints, values, sides)
}

/// Velocity as a left-continuous function of the mass coordinate: the i-th
/// body's velocity on the mass interval it occupies (endpoint included).
pub fn velocity_profile(sys: &ParticleSystem) -> Result<StepFunction> {
    step_over_mass(sys, |i| sys.bodies()[i].velocity)
}

/// Position as a left-continuous function of the mass coordinate.
pub fn position_profile(sys: &ParticleSystem) -> Result<StepFunction> {
    step_over_mass(sys, |i| sys.bodies()[i].position)
}

/// Antiderivative of a step profile on `[0, m_max]`, anchored to zero at the
/// origin. Piecewise linear with knots at the profile's breakpoints.
pub fn cumulative_flux(a: &StepFunction, m_max: f64) -> Result<PiecewiseLinear> {
    if !(m_max > 0.0) {
        return Err(Error::Invalid(format!(
            "mass span {m_max} must be positive"
        )));
    }
    let mut xs = vec![0.0];
    xs.extend(
        a.breakpoints()
            .iter()
            .copied()
            .filter(|&b| b > 0.0 && b < m_max),
    );
    xs.push(m_max);
    let mut knots = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    knots.push((0.0, 0.0));
    for w in xs.windows(2) {
        acc += a.limit_left(w[1]) * (w[1] - w[0]);
        knots.push((w[1], acc));
    }
    PiecewiseLinear::new(knots)
}

/// One maximal linear piece of the hull: the mass interval
/// `(mass_lo, mass_hi)` sits at `position` at the queried time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullPiece {
    pub mass_lo: f64,
    pub mass_hi: f64,
    pub position: f64,
}

/// Spatial interval `(x_lo, x_hi)` carrying no mass at the queried time,
/// located at the hull kink with mass coordinate `mass`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumInterval {
    pub mass: f64,
    pub x_lo: f64,
    pub x_hi: f64,
}

/// State at one time as read off the hull: occupied pieces in mass order,
/// alternating with the vacuum intervals between them.
#[derive(Debug, Clone, PartialEq)]
pub struct HullState {
    pub time: f64,
    pub pieces: Vec<HullPiece>,
    pub vacuum: Vec<VacuumInterval>,
}

/// The time-shifted mass potential `phi0 + t A` whose hull encodes the
/// solution at time `t`.
pub fn shifted_potential(sys0: &ParticleSystem, t: f64) -> Result<PiecewiseLinear> {
    let m_total = sys0.total_mass();
    let phi0 = cumulative_flux(&position_profile(sys0)?, m_total)?;
    let flux = cumulative_flux(&velocity_profile(sys0)?, m_total)?;
    phi0.add_scaled(&flux, t)
}

/// Positions of all mass clusters at time `t`, computed from the lower
/// convex hull of the shifted potential without ever simulating collisions.
pub fn hull_positions(sys0: &ParticleSystem, t: f64) -> Result<HullState> {
    if t < 0.0 {
        return Err(Error::TimeReversed {
            system: 0.0,
            requested: t,
        });
    }
    let hull = lower_convex_hull(&shifted_potential(sys0, t)?);
    let knots = hull.knots();
    let slopes = hull.slopes();
    let pieces: Vec<HullPiece> = slopes
        .iter()
        .enumerate()
        .map(|(i, &s)| HullPiece {
            mass_lo: knots[i].0,
            mass_hi: knots[i + 1].0,
            position: s,
        })
        .collect();
    let vacuum = pieces
        .windows(2)
        .map(|w| VacuumInterval {
            mass: w[0].mass_hi,
            x_lo: w[0].position,
            x_hi: w[1].position,
        })
        .filter(|v| v.x_hi - v.x_lo > VACUUM_SLACK)
        .collect();
    Ok(HullState {
        time: t,
        pieces,
        vacuum,
    })
}

/// Convex space potential of a system state on `[lo, hi]`: the integral of
/// the cumulative mass function, anchored to zero left of the leftmost body.
/// Its slope at any non-atom point is the mass to the left of that point.
pub fn potential_psi(sys: &ParticleSystem, lo: f64, hi: f64) -> Result<PiecewiseLinear> {
    let terms: Vec<(f64, f64)> = sys.bodies().iter().map(|b| (b.mass, b.position)).collect();
    positive_part_sum(&terms, lo, hi)
}

/// Space potential at `(x, t)` through the conjugate representation
/// `sup_m { x m - phi0(m) - t A(m) }`, evaluated exactly over the knots of
/// the shifted potential. Agrees with [`potential_psi`] of the evolved
/// system up to the shared anchoring.
pub fn hopf_potential(sys0: &ParticleSystem, t: f64, x: f64) -> Result<f64> {
    let g = shifted_potential(sys0, t)?;
    Ok(g.knots()
        .iter()
        .map(|&(m, v)| x * m - v)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Outcome of the viscosity inequalities at one kink of the space
/// potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinkCheck {
    pub position: f64,
    pub slope_left: f64,
    pub slope_right: f64,
    /// No smooth function can touch a convex kink from above, so the
    /// supersolution test holds with nothing to verify.
    pub upper_test_vacuous: bool,
    /// Worst value of `A(p) - chord(p)` over sampled subdifferential slopes
    /// `p`; nonnegative means the subsolution inequality holds.
    pub lower_test_margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViscosityReport {
    pub kinks: Vec<KinkCheck>,
    pub pass: bool,
}

/// Number of subdifferential slopes sampled per kink.
const KINK_SAMPLES: usize = 64;

/// Checks the two one-sided viscosity inequalities of
/// `d/dt psi + A(d/dx psi) = 0` at every kink of a convex space potential.
///
/// At a kink the subdifferential is the mass interval `[M_l, M_r]` between
/// the adjacent slopes. Touching from above is impossible there (strict
/// slope increase), and touching from below requires the flux to dominate
/// its own chord over the subdifferential, which is sampled at
/// [`KINK_SAMPLES`] points. `queries` adds smooth points to the report;
/// these have singleton subdifferentials and zero margin.
pub fn viscosity_certificate(
    psi: &PiecewiseLinear,
    flux: &PiecewiseLinear,
    queries: &[f64],
) -> Result<ViscosityReport> {
    if !psi.is_convex() {
        return Err(Error::NonConvex("space potential must be convex".into()));
    }
    let slopes = psi.slopes();
    let knots = psi.knots();
    let mut kinks: Vec<KinkCheck> = Vec::new();
    for i in 1..knots.len().saturating_sub(1) {
        kinks.push(check_kink(flux, knots[i].0, slopes[i - 1], slopes[i])?);
    }
    for &x in queries {
        if knots
            .iter()
            .skip(1)
            .take(knots.len().saturating_sub(2))
            .any(|&(k, _)| (k - x).abs() < 1e-12)
        {
            continue;
        }
        let p = slope_at(psi, x)?;
        kinks.push(KinkCheck {
            position: x,
            slope_left: p,
            slope_right: p,
            upper_test_vacuous: false,
            lower_test_margin: 0.0,
        });
    }
    kinks.sort_by(|a, b| a.position.total_cmp(&b.position));
    let pass = kinks
        .iter()
        .all(|k| (k.slope_right >= k.slope_left) && k.lower_test_margin >= -1e-12);
    Ok(ViscosityReport { kinks, pass })
}

fn check_kink(flux: &PiecewiseLinear, x: f64, m_l: f64, m_r: f64) -> Result<KinkCheck> {
    let chord_lo = flux.try_eval(m_l)?;
    let chord_hi = flux.try_eval(m_r)?;
    let mut margin = f64::INFINITY;
    for k in 0..KINK_SAMPLES {
        let s = k as f64 / (KINK_SAMPLES - 1) as f64;
        let p = m_l + s * (m_r - m_l);
        let chord = chord_lo + s * (chord_hi - chord_lo);
        margin = margin.min(flux.try_eval(p)? - chord);
    }
    Ok(KinkCheck {
        position: x,
        slope_left: m_l,
        slope_right: m_r,
        upper_test_vacuous: m_r > m_l,
        lower_test_margin: margin,
    })
}

fn slope_at(psi: &PiecewiseLinear, x: f64) -> Result<f64> {
    let (lo, hi) = psi.domain();
    if x < lo || x > hi {
        return Err(Error::OutOfDomain(format!("{x} outside [{lo}, {hi}]")));
    }
    let knots = psi.knots();
    let slopes = psi.slopes();
    let i = knots
        .partition_point(|&(k, _)| k < x)
        .clamp(1, knots.len() - 1);
    Ok(slopes[i - 1])
}
