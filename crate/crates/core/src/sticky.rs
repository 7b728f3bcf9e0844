//! Event-driven dynamics of point masses on a line that move ballistically
//! and stick on contact, conserving mass and momentum.
//!
//! Collision times are obtained from closed-form linear solves, so an
//! evolution is exact up to rounding: there is no time stepping. Each body
//! remembers the contiguous range of initial particles it absorbed, which is
//! what downstream consumers use to tie clusters back to mass coordinates.

use crate::error::{Error, Result};
use crate::measures::PiecewiseLinear;

/// Relative slack used to decide that two collision times coincide.
const EVENT_TIME_SLACK: f64 = 1e-12;

/// One ballistic body: either an initial particle or a cluster of merged
/// ones. `first..=last` are indices of the constituent initial particles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Body {
    pub mass: f64,
    pub position: f64,
    pub velocity: f64,
    pub first: usize,
    pub last: usize,
}

impl Body {
    pub fn is_cluster(&self) -> bool {
        self.first < self.last
    }
}

/// A pending merge of the bodies `first..=last` (current body indices),
/// which meet at `position` at `time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionEvent {
    pub time: f64,
    pub position: f64,
    pub first: usize,
    pub last: usize,
}

/// Ordered collection of bodies at a common time.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSystem {
    time: f64,
    bodies: Vec<Body>,
}

impl ParticleSystem {
    /// Builds a system at time zero from per-particle data.
    pub fn new(masses: &[f64], positions: &[f64], velocities: &[f64]) -> Result<Self> {
        if masses.len() != positions.len() || masses.len() != velocities.len() {
            return Err(Error::Invalid(format!(
                "length mismatch: {} masses, {} positions, {} velocities",
                masses.len(),
                positions.len(),
                velocities.len()
            )));
        }
        for (i, &m) in masses.iter().enumerate() {
            if !m.is_finite() || m <= 0.0 {
                return Err(Error::Invalid(format!("mass {m} at index {i}")));
            }
        }
        if positions.iter().chain(velocities).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite position or velocity".into()));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Unsorted(
                "positions must be strictly increasing".into(),
            ));
        }
        let bodies = masses
            .iter()
            .zip(positions)
            .zip(velocities)
            .enumerate()
            .map(|(i, ((&mass, &position), &velocity))| Body {
                mass,
                position,
                velocity,
                first: i,
                last: i,
            })
            .collect();
        Ok(Self { time: 0.0, bodies })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn bodies(&self) -> &[Body] {
        &self.bodies
    }

    pub fn len(&self) -> usize {
        self.bodies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bodies.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.bodies.iter().map(|b| b.mass).sum()
    }

    pub fn total_momentum(&self) -> f64 {
        self.bodies.iter().map(|b| b.mass * b.velocity).sum()
    }

    pub fn kinetic_energy(&self) -> f64 {
        self.bodies
            .iter()
            .map(|b| 0.5 * b.mass * b.velocity * b.velocity)
            .sum()
    }

    /// Cumulative masses `M_0=0 < M_1 < ... < M_n`, one entry per body
    /// boundary.
    pub fn cumulative_mass(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.bodies.len() + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for b in &self.bodies {
            acc += b.mass;
            out.push(acc);
        }
        out
    }

    fn advance(&mut self, t: f64) {
        let dt = t - self.time;
        for b in &mut self.bodies {
            b.position += dt * b.velocity;
        }
        self.time = t;
    }

    /// Earliest meeting of adjacent bodies under ballistic motion, with
    /// simultaneous meetings at one point grouped into a single event and
    /// ties between separated groups broken towards the leftmost. `None`
    /// when no adjacent pair converges.
    pub fn next_collision(&self) -> Option<CollisionEvent> {
        let hit_times: Vec<f64> = self
            .bodies
            .windows(2)
            .map(|w| {
                let dv = w[0].velocity - w[1].velocity;
                if dv > 0.0 {
                    self.time + (w[1].position - w[0].position).max(0.0) / dv
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        let t_min = hit_times.iter().copied().fold(f64::INFINITY, f64::min);
        if !t_min.is_finite() {
            return None;
        }
        let slack = EVENT_TIME_SLACK * t_min.abs().max(1.0);
        let first = hit_times.iter().position(|&t| t <= t_min + slack)?;
        let mut last_pair = first;
        while last_pair + 1 < hit_times.len() && hit_times[last_pair + 1] <= t_min + slack {
            last_pair += 1;
        }
        let last = last_pair + 1;
        let dt = t_min - self.time;
        let group = &self.bodies[first..=last];
        let mass: f64 = group.iter().map(|b| b.mass).sum();
        let position = group
            .iter()
            .map(|b| b.mass * (b.position + dt * b.velocity))
            .sum::<f64>()
            / mass;
        Some(CollisionEvent {
            time: t_min,
            position,
            first,
            last,
        })
    }

    /// Advances every body to the event time and replaces the bodies
    /// `ev.first..=ev.last` by their inelastic merger.
    pub fn merge(&mut self, ev: &CollisionEvent) -> Result<()> {
        if ev.last >= self.bodies.len() || ev.first > ev.last {
            return Err(Error::Invalid(format!(
                "event range {}..={} out of bounds for {} bodies",
                ev.first,
                ev.last,
                self.bodies.len()
            )));
        }
        if ev.time < self.time {
            return Err(Error::TimeReversed {
                system: self.time,
                requested: ev.time,
            });
        }
        let energy_before = self.kinetic_energy();
        self.advance(ev.time);
        let group = &self.bodies[ev.first..=ev.last];
        let mass: f64 = group.iter().map(|b| b.mass).sum();
        let velocity = group.iter().map(|b| b.mass * b.velocity).sum::<f64>() / mass;
        let merged = Body {
            mass,
            position: ev.position,
            velocity,
            first: group[0].first,
            last: group[group.len() - 1].last,
        };
        self.bodies.splice(ev.first..=ev.last, [merged]);
        debug_assert!(
            self.kinetic_energy() <= energy_before * (1.0 + 1e-12) + 1e-12,
            "merge increased kinetic energy"
        );
        Ok(())
    }

    /// State at time `t`, processing every intervening collision.
    pub fn evolve(&self, t: f64) -> Result<ParticleSystem> {
        Ok(self.evolve_logged(t)?.0)
    }

    /// Like [`evolve`](Self::evolve), also returning the collision events
    /// processed on the way, in time order.
    pub fn evolve_logged(&self, t: f64) -> Result<(ParticleSystem, Vec<CollisionEvent>)> {
        if t < self.time {
            return Err(Error::TimeReversed {
                system: self.time,
                requested: t,
            });
        }
        let mut sys = self.clone();
        let mut events = Vec::new();
        while let Some(ev) = sys.next_collision() {
            if ev.time > t {
                break;
            }
            sys.merge(&ev)?;
            events.push(ev);
        }
        sys.advance(t);
        Ok((sys, events))
    }
}

/// Worst violation of the shock-speed condition over a set of sample times:
/// each cluster must travel at the chord slope of the mass-coordinate flux
/// over its constituent mass interval.
///
/// `initial` fixes the mass bookkeeping (its bodies are the reference
/// particles the evolved clusters index into); `flux` is the antiderivative
/// of the velocity profile on `[0, total mass]`.
pub fn rankine_hugoniot_residual(
    initial: &ParticleSystem,
    times: &[f64],
    flux: &PiecewiseLinear,
) -> Result<f64> {
    let cumulative = initial.cumulative_mass();
    let mut worst: f64 = 0.0;
    for &t in times {
        let sys = initial.evolve(t)?;
        for b in sys.bodies() {
            let m_lo = cumulative[b.first];
            let m_hi = cumulative[b.last + 1];
            let chord = (flux.try_eval(m_hi)? - flux.try_eval(m_lo)?) / (m_hi - m_lo);
            worst = worst.max((b.velocity - chord).abs());
        }
    }
    Ok(worst)
}
