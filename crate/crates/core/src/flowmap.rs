//! Lagrangian picture of the dynamics: the forward map
//! `y -> y + t * u0(y)`, the partition of the line it induces once
//! characteristics cross, and reconstruction of position and velocity as
//! mass averages over partition elements.
//!
//! Initial data enter as a pair: an atomic mass measure and a
//! right-continuous step velocity field whose value at an atom is that
//! atom's velocity. Between atoms the field describes massless points that
//! translate freely; intervals of initial atoms that have merged by time
//! `t` form elements mapping to a single image point, and the space swept
//! out between a body's initial footprint and its current position has no
//! preimage at all.

use crate::error::{Error, Result};
use crate::measures::{AtomicMeasure, StepFunction};
use crate::sticky::ParticleSystem;

/// Matching width for deciding that a query point coincides with a body
/// image.
const IMAGE_SLACK: f64 = 1e-12;

/// Builds the particle system encoded by an atomic measure plus a
/// right-continuous velocity field.
pub fn initial_system(p0: &AtomicMeasure, u0: &StepFunction) -> Result<ParticleSystem> {
    let masses: Vec<f64> = p0.atoms().iter().map(|&(_, m)| m).collect();
    let positions: Vec<f64> = p0.atoms().iter().map(|&(y, _)| y).collect();
    let velocities: Vec<f64> = positions.iter().map(|&y| u0.eval(y)).collect();
    ParticleSystem::new(&masses, &positions, &velocities)
}

/// One affine branch of the forward map: every `y` in the open interval
/// `(y_lo, y_hi)` moves with the given velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffinePiece {
    pub y_lo: f64,
    pub y_hi: f64,
    pub velocity: f64,
}

/// The map `y -> y + t * u0(y)`, kept as the underlying field plus the
/// time so evaluation is exact; the affine branches and the images of the
/// field's breakpoints are available for table-style inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardMap {
    t: f64,
    u0: StepFunction,
}

impl ForwardMap {
    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn eval(&self, y: f64) -> f64 {
        y + self.t * self.u0.eval(y)
    }

    /// Affine branches between consecutive breakpoints, outermost ones
    /// unbounded.
    pub fn pieces(&self) -> Vec<AffinePiece> {
        let bps = self.u0.breakpoints();
        let values = self.u0.values();
        let mut out = Vec::with_capacity(values.len());
        for (i, &v) in values.iter().enumerate() {
            let y_lo = if i == 0 {
                f64::NEG_INFINITY
            } else {
                bps[i - 1]
            };
            let y_hi = if i == bps.len() {
                f64::INFINITY
            } else {
                bps[i]
            };
            out.push(AffinePiece {
                y_lo,
                y_hi,
                velocity: v,
            });
        }
        out
    }

    /// `(y, image)` for every breakpoint of the field.
    pub fn breakpoint_images(&self) -> Vec<(f64, f64)> {
        self.u0
            .breakpoints()
            .iter()
            .map(|&y| (y, self.eval(y)))
            .collect()
    }
}

pub fn forward_map(u0: &StepFunction, t: f64) -> Result<ForwardMap> {
    if t < 0.0 {
        return Err(Error::TimeReversed {
            system: 0.0,
            requested: t,
        });
    }
    Ok(ForwardMap { t, u0: u0.clone() })
}

/// Mass-carrying partition element: the initial interval `[y_lo, y_hi]`
/// (a single atom when the endpoints coincide) maps to the one point
/// `image`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyElement {
    pub y_lo: f64,
    pub y_hi: f64,
    pub image: f64,
    pub velocity: f64,
    pub mass: f64,
}

/// Massless interval translating rigidly; `(y_lo, y_hi)` is open and its
/// image is `(y_lo + t v, y_hi + t v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumPiece {
    pub y_lo: f64,
    pub y_hi: f64,
    pub velocity: f64,
}

/// Interval of points with empty preimage, vacated by a moving body.
/// Closed/open endpoint flags record exact set membership.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub x_lo: f64,
    pub x_hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Gap {
    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed {
            x >= self.x_lo
        } else {
            x > self.x_lo
        };
        let below = if self.hi_closed {
            x <= self.x_hi
        } else {
            x < self.x_hi
        };
        above && below
    }
}

/// Classification of a single point of the line at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointClass {
    /// `x` is the image of the indexed body element.
    Body(usize),
    /// `x` has the unique massless preimage `y`.
    Regular { y: f64, velocity: f64 },
    /// `x` has empty preimage; `gap` indexes the vacated interval listing
    /// it, `None` for points emptied by diverging velocities instead of a
    /// passing body.
    Empty { gap: Option<usize> },
}

/// Decomposition of the line at time `t` induced by the forward map:
/// mass-carrying elements, rigidly translating vacuum pieces, and the
/// vacated intervals in between.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub t: f64,
    pub bodies: Vec<BodyElement>,
    pub vacuum: Vec<VacuumPiece>,
    pub gaps: Vec<Gap>,
}

impl Partition {
    /// Assigns `x` to exactly one class. Body images win over gap
    /// membership (they can touch when a faster body has just caught up),
    /// and crossing massless characteristics are resolved to the leftmost
    /// vacuum piece whose preimage formula lands inside it.
    pub fn classify(&self, x: f64) -> PointClass {
        if let Some(i) = self
            .bodies
            .iter()
            .position(|b| (x - b.image).abs() <= IMAGE_SLACK)
        {
            return PointClass::Body(i);
        }
        if let Some(i) = self.gaps.iter().position(|g| g.contains(x)) {
            return PointClass::Empty { gap: Some(i) };
        }
        for piece in &self.vacuum {
            let y = x - self.t * piece.velocity;
            if y > piece.y_lo && y < piece.y_hi {
                return PointClass::Regular {
                    y,
                    velocity: piece.velocity,
                };
            }
        }
        PointClass::Empty { gap: None }
    }
}

/// Partition of the line at time `t` for the given initial data.
pub fn inverse_partition(p0: &AtomicMeasure, u0: &StepFunction, t: f64) -> Result<Partition> {
    if t < 0.0 {
        return Err(Error::TimeReversed {
            system: 0.0,
            requested: t,
        });
    }
    let sys0 = initial_system(p0, u0)?;
    let evolved = sys0.evolve(t)?;
    let atoms = p0.atoms();

    let bodies: Vec<BodyElement> = evolved
        .bodies()
        .iter()
        .map(|b| BodyElement {
            y_lo: atoms[b.first].0,
            y_hi: atoms[b.last].0,
            image: b.position,
            velocity: b.velocity,
            mass: b.mass,
        })
        .collect();

    let mut vacuum = Vec::with_capacity(bodies.len() + 1);
    let first_span = bodies.first().map_or(f64::INFINITY, |b| b.y_lo);
    vacuum.push(VacuumPiece {
        y_lo: f64::NEG_INFINITY,
        y_hi: first_span,
        velocity: u0.limit_left(first_span),
    });
    for w in bodies.windows(2) {
        vacuum.push(VacuumPiece {
            y_lo: w[0].y_hi,
            y_hi: w[1].y_lo,
            velocity: u0.limit_right(w[0].y_hi),
        });
    }
    if let Some(last) = bodies.last() {
        vacuum.push(VacuumPiece {
            y_lo: last.y_hi,
            y_hi: f64::INFINITY,
            velocity: u0.limit_right(last.y_hi),
        });
    }

    let mut gaps = Vec::new();
    for b in &bodies {
        if b.image > b.y_hi {
            gaps.push(Gap {
                x_lo: b.y_lo,
                x_hi: b.image,
                lo_closed: true,
                hi_closed: false,
            });
        } else if b.image < b.y_lo {
            gaps.push(Gap {
                x_lo: b.image,
                x_hi: b.y_hi,
                lo_closed: false,
                hi_closed: true,
            });
        } else {
            if b.image > b.y_lo {
                gaps.push(Gap {
                    x_lo: b.y_lo,
                    x_hi: b.image,
                    lo_closed: true,
                    hi_closed: false,
                });
            }
            if b.image < b.y_hi {
                gaps.push(Gap {
                    x_lo: b.image,
                    x_hi: b.y_hi,
                    lo_closed: false,
                    hi_closed: true,
                });
            }
        }
    }

    Ok(Partition {
        t,
        bodies,
        vacuum,
        gaps,
    })
}

/// Mass-averaged position and velocity of the partition element containing
/// the initial point `y`: averages of `eta + t * u0(eta)` and of
/// `u0(eta)` over the element's atoms. Errors when `y` lies in vacuum.
pub fn gvp_reconstruct(
    p0: &AtomicMeasure,
    u0: &StepFunction,
    t: f64,
    y: f64,
) -> Result<(f64, f64)> {
    let sys0 = initial_system(p0, u0)?;
    let evolved = sys0.evolve(t)?;
    let atoms = p0.atoms();
    let body = evolved
        .bodies()
        .iter()
        .find(|b| atoms[b.first].0 <= y && y <= atoms[b.last].0)
        .ok_or_else(|| Error::Vacuum(format!("no mass in the element containing {y}")))?;
    let constituents = &atoms[body.first..=body.last];
    let mass: f64 = constituents.iter().map(|&(_, m)| m).sum();
    let phi = constituents
        .iter()
        .map(|&(eta, m)| m * (eta + t * u0.eval(eta)))
        .sum::<f64>()
        / mass;
    let u = constituents
        .iter()
        .map(|&(eta, m)| m * u0.eval(eta))
        .sum::<f64>()
        / mass;
    Ok((phi, u))
}

/// Whether `y` is the left endpoint of a partition element at time `t`:
/// every mass average of `eta + t * u0(eta)` over atoms strictly left of
/// `y` must fall strictly below every such average over atoms at or right
/// of `y`. Intervals carrying no atoms impose no constraint.
pub fn left_endpoint_test(p0: &AtomicMeasure, u0: &StepFunction, t: f64, y: f64) -> bool {
    let ballistic: Vec<(f64, f64)> = p0
        .atoms()
        .iter()
        .map(|&(eta, m)| (eta + t * u0.eval(eta), m))
        .collect();
    let split = p0.atoms().partition_point(|&(eta, _)| eta < y);

    let mut worst_left = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut mass = 0.0;
    for &(value, m) in ballistic[..split].iter().rev() {
        sum += m * value;
        mass += m;
        worst_left = worst_left.max(sum / mass);
    }

    let mut best_right = f64::INFINITY;
    sum = 0.0;
    mass = 0.0;
    for &(value, m) in &ballistic[split..] {
        sum += m * value;
        mass += m;
        best_right = best_right.min(sum / mass);
    }

    worst_left < best_right
}

/// Compactly supported C^1 bump `(1 - s^2)^2` on `|s| < 1`, rescaled to be
/// centred at `center` with half-width `halfwidth`.
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    pub center: f64,
    pub halfwidth: f64,
}

impl Bump {
    pub fn eval(&self, x: f64) -> f64 {
        let s = (x - self.center) / self.halfwidth;
        if s.abs() >= 1.0 {
            0.0
        } else {
            let q = 1.0 - s * s;
            q * q
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let s = (x - self.center) / self.halfwidth;
        if s.abs() >= 1.0 {
            0.0
        } else {
            -4.0 * s * (1.0 - s * s) / self.halfwidth
        }
    }
}

/// Residual of the weak continuity equation for the mass measure against
/// one bump test function:
/// `sum m f(x(t2)) - sum m f(x(t1)) - int_{t1}^{t2} sum m f'(x) v dtau`.
///
/// The time integral is split at collision events and at the times any
/// body crosses a bump edge, making the integrand a cubic polynomial on
/// each slice; two-point Gauss quadrature per slice is then exact.
pub fn weak_residual(
    p0: &AtomicMeasure,
    u0: &StepFunction,
    t1: f64,
    t2: f64,
    test: Bump,
) -> Result<f64> {
    if t2 < t1 {
        return Err(Error::TimeReversed {
            system: t1,
            requested: t2,
        });
    }
    let sys0 = initial_system(p0, u0)?;
    let moment = |sys: &ParticleSystem| -> f64 {
        sys.bodies()
            .iter()
            .map(|b| b.mass * test.eval(b.position))
            .sum()
    };
    let lhs = moment(&sys0.evolve(t2)?) - moment(&sys0.evolve(t1)?);

    let (_, events) = sys0.evolve_logged(t2)?;
    let mut cuts: Vec<f64> = vec![t1, t2];
    cuts.extend(events.iter().map(|e| e.time).filter(|&s| s > t1 && s < t2));
    for &s in cuts.clone().iter() {
        let sys = sys0.evolve(s)?;
        for b in sys.bodies() {
            if b.velocity == 0.0 {
                continue;
            }
            for edge in [
                test.center - test.halfwidth,
                test.center,
                test.center + test.halfwidth,
            ] {
                let hit = s + (edge - b.position) / b.velocity;
                if hit > t1 && hit < t2 {
                    cuts.push(hit);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let gauss = 1.0 / f64::sqrt(3.0);
    let mut integral = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        for node in [mid - half * gauss, mid + half * gauss] {
            let sys = sys0.evolve(node)?;
            let flux: f64 = sys
                .bodies()
                .iter()
                .map(|b| b.mass * test.derivative(b.position) * b.velocity)
                .sum();
            integral += half * flux;
        }
    }
    Ok((lhs - integral).abs())
}
