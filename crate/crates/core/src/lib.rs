//! Exact solution methods for one-dimensional scalar conservation laws and
//! pressureless (adhesion) dynamics with discrete initial data, together with
//! Monte Carlo machinery for shock statistics of piecewise-constant ensembles.
//!
//! The crate is organised around four mutually cross-validating solvers for
//! the same discrete initial data:
//!
//! * [`sticky`]: event-driven particle dynamics with perfectly inelastic
//!   collisions,
//! * [`hopflax`]: variational solution of the cumulative-mass equation by
//!   convex hulls of a time-shifted potential,
//! * [`flowmap`]: the Lagrangian flow map with its inverse partition and
//!   mass-averaged reconstruction,
//! * [`genpot`]: minimisation of a Stieltjes potential with backward
//!   characteristics and entropy diagnostics.
//!
//! [`fronttrack`] solves scalar laws with piecewise-linear convex flux
//! exactly by front tracking, and [`randstats`] layers random initial laws,
//! shock-geometry sampling and n-point correlation estimates on top of it.

pub mod error;
pub mod flowmap;
pub mod fronttrack;
pub mod genpot;
pub mod hopflax;
pub mod measures;
pub mod randstats;
pub mod report;
pub mod scenario;
pub mod sticky;

pub use error::{Error, Result};
pub use measures::{AtomicMeasure, PiecewiseLinear, Side, StepFunction};
pub use sticky::{Body, CollisionEvent, ParticleSystem};
