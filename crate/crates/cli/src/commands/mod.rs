//! One module per subcommand; each takes the parsed config plus resolved
//! flags, writes its artifacts and returns a one-line summary.

pub mod crosscheck;
pub mod flowmap;
pub mod fm_shocks;
pub mod fronttrack;
pub mod genpot;
pub mod hopflax;
pub mod mc_stats;
pub mod sticky;

use crate::config::RunConfig;
use crate::{Failure, Invocation};
use conslaw_core::randstats::InitialLaw;

/// The `[law]` section with the seed flag applied, revalidated.
pub(crate) fn resolved_law(cfg: &RunConfig, inv: &Invocation) -> Result<InitialLaw, Failure> {
    let mut law = cfg.law()?.clone();
    if let Some(seed) = inv.seed {
        law.seed = seed;
    }
    law.validate()
        .map_err(|e| Failure::Config(format!("bad [law] section: {e}")))?;
    Ok(law)
}

/// Applies the worker-count flag to the global thread pool. Results never
/// depend on the pool size; this only bounds parallelism.
pub(crate) fn build_pool(workers: Option<usize>) {
    if let Some(w) = workers {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global();
    }
}

pub(crate) fn config_err(section: &str, e: conslaw_core::Error) -> Failure {
    Failure::Config(format!("bad [{section}] section: {e}"))
}
