//! Random initial data and Monte Carlo shock statistics.
//!
//! The submodules cover the probabilistic side of the crate: [`laws`] draws
//! piecewise-constant initial profiles from a handful of seeded distribution
//! families, [`drift`] evolves a drift coefficient along characteristics in
//! closed form, [`contacts`] extracts shock geometry from a potential path by
//! the sliding-parabola construction, [`npoint`] turns an ensemble of
//! front-tracking solutions into one- and two-point correlation estimates,
//! and [`hierarchy`] checks the evolution identities that couple them.
//!
//! Everything is deterministic given a seed: ensembles draw realization `i`
//! from stream `i` of a counter-based generator, so results do not depend on
//! thread scheduling.

pub mod contacts;
pub mod drift;
pub mod hierarchy;
pub mod laws;
pub mod npoint;

pub use contacts::{parabola_contacts, scan_shocks, ContactPoint, ShockSample};
pub use drift::{coalescence_velocities, drift_at, drift_evolution, drift_numeric};
pub use hierarchy::{hierarchy_residual_first, hierarchy_residual_second, HierarchyEstimate};
pub use laws::{
    index_profile, integrate_negative, sample_initial, sample_initial_jumps, sample_initial_stream,
    sample_jumps_stream, sample_psi, sample_psi_stream, EnsembleRunner, InitialLaw, JumpPosition,
    JumpRecord, JumpSizeLaw, LawKind, StartState,
};
pub use npoint::{estimate_p, estimate_pair_coincidence, EstimateKind, NPointEstimate};
