//! Seeded families of random piecewise-constant initial profiles.
//!
//! A profile is drawn from an [`InitialLaw`] over a bounded domain and comes
//! back as a [`StepFunction`], optionally with the list of jumps the
//! underlying process took. Realization `i` of an ensemble reads stream `i`
//! of a ChaCha generator seeded with the law's seed, so every sample is
//! reproducible bit for bit and independent of evaluation order.

use crate::error::{Error, Result};
use crate::fronttrack::{FluxTable, FrontList};
use crate::measures::{PiecewiseLinear, StepFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Exp1, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Location of a single jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum JumpPosition {
    Fixed(f64),
    /// Uniformly distributed on the closed interval.
    Uniform(f64, f64),
}

/// Distribution of a downward jump magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum JumpSizeLaw {
    Fixed(f64),
    Exponential { mean: f64 },
    Uniform { lo: f64, hi: f64 },
}

/// Initial state of a Markov path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StartState {
    Uniform,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LawKind {
    /// One jump between two levels.
    Riemann {
        left: f64,
        right: f64,
        position: JumpPosition,
    },
    /// Three levels and two jumps: the first jump is placed by `first`, the
    /// second follows at a uniform distance from `gap`.
    TwoJump {
        values: [f64; 3],
        first: JumpPosition,
        gap: (f64, f64),
    },
    /// Continuous-space Markov jump process on a fixed value lattice with
    /// exponential gaps between transition attempts.
    MarkovChain {
        states: Vec<f64>,
        transition: Vec<Vec<f64>>,
        rate: f64,
        start: StartState,
    },
    /// Linear drift plus Poisson downward jumps, rounded to a value grid of
    /// spacing `step`.
    SpectrallyNegative {
        drift: f64,
        intensity: f64,
        sizes: JumpSizeLaw,
        step: f64,
    },
    /// Velocity profile whose potential is a random walk sampled every
    /// `step`: the profile is constant on each grid cell.
    BrownianPotential { variance_rate: f64, step: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialLaw {
    pub kind: LawKind,
    pub seed: u64,
}

/// One jump taken by the sampled process: `size` is the value to the right
/// minus the value to the left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord {
    pub position: f64,
    pub size: f64,
}

impl InitialLaw {
    pub fn new(kind: LawKind, seed: u64) -> Result<Self> {
        let law = InitialLaw { kind, seed };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            LawKind::Riemann {
                left,
                right,
                position,
            } => {
                if !left.is_finite() || !right.is_finite() {
                    return Err(Error::InvalidLaw("non-finite level".into()));
                }
                validate_position(position)
            }
            LawKind::TwoJump { values, first, gap } => {
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidLaw("non-finite level".into()));
                }
                if !(gap.0 > 0.0 && gap.1 >= gap.0) {
                    return Err(Error::InvalidLaw(format!(
                        "gap range ({}, {}) must satisfy 0 < lo <= hi",
                        gap.0, gap.1
                    )));
                }
                validate_position(first)
            }
            LawKind::MarkovChain {
                states,
                transition,
                rate,
                start,
            } => {
                if states.is_empty() {
                    return Err(Error::InvalidLaw("no states".into()));
                }
                if states.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidLaw("states must strictly increase".into()));
                }
                if transition.len() != states.len() {
                    return Err(Error::InvalidLaw(format!(
                        "{} transition rows for {} states",
                        transition.len(),
                        states.len()
                    )));
                }
                for (i, row) in transition.iter().enumerate() {
                    if row.len() != states.len() {
                        return Err(Error::InvalidLaw(format!("row {i} has wrong length")));
                    }
                    if row.iter().any(|p| !(0.0..=1.0 + 1e-12).contains(p)) {
                        return Err(Error::InvalidLaw(format!(
                            "row {i} has entries outside [0, 1]"
                        )));
                    }
                    let total: f64 = row.iter().sum();
                    if (total - 1.0).abs() > 1e-9 {
                        return Err(Error::InvalidLaw(format!("row {i} sums to {total}, not 1")));
                    }
                }
                if !(*rate > 0.0 && rate.is_finite()) {
                    return Err(Error::InvalidLaw(format!(
                        "jump rate {rate} must be positive"
                    )));
                }
                if let StartState::Fixed(i) = start {
                    if *i >= states.len() {
                        return Err(Error::InvalidLaw(format!("start state {i} out of range")));
                    }
                }
                Ok(())
            }
            LawKind::SpectrallyNegative {
                drift,
                intensity,
                sizes,
                step,
            } => {
                if !drift.is_finite() {
                    return Err(Error::InvalidLaw("non-finite drift".into()));
                }
                if !(*intensity >= 0.0 && intensity.is_finite()) {
                    return Err(Error::InvalidLaw(format!(
                        "jump intensity {intensity} must be >= 0"
                    )));
                }
                if !(*step > 0.0 && step.is_finite()) {
                    return Err(Error::InvalidLaw(format!(
                        "grid step {step} must be positive"
                    )));
                }
                match sizes {
                    JumpSizeLaw::Fixed(s) if !(*s > 0.0) => {
                        Err(Error::InvalidLaw("jump size must be positive".into()))
                    }
                    JumpSizeLaw::Exponential { mean } if !(*mean > 0.0) => {
                        Err(Error::InvalidLaw("jump size mean must be positive".into()))
                    }
                    JumpSizeLaw::Uniform { lo, hi } if !(*lo >= 0.0 && hi > lo) => Err(
                        Error::InvalidLaw("jump size range must satisfy 0 <= lo < hi".into()),
                    ),
                    _ => Ok(()),
                }
            }
            LawKind::BrownianPotential {
                variance_rate,
                step,
            } => {
                if !(*variance_rate > 0.0 && variance_rate.is_finite()) {
                    return Err(Error::InvalidLaw(format!(
                        "variance rate {variance_rate} must be positive"
                    )));
                }
                if !(*step > 0.0 && step.is_finite()) {
                    return Err(Error::InvalidLaw(format!(
                        "grid step {step} must be positive"
                    )));
                }
                Ok(())
            }
        }
    }
}

fn validate_position(p: &JumpPosition) -> Result<()> {
    match p {
        JumpPosition::Fixed(x) if !x.is_finite() => {
            Err(Error::InvalidLaw("non-finite jump position".into()))
        }
        JumpPosition::Uniform(a, b) if !(a.is_finite() && b.is_finite() && a < b) => Err(
            Error::InvalidLaw(format!("jump position range ({a}, {b}) must be ordered")),
        ),
        _ => Ok(()),
    }
}

fn check_domain(domain: (f64, f64)) -> Result<()> {
    if !(domain.0.is_finite() && domain.1.is_finite() && domain.0 < domain.1) {
        return Err(Error::Invalid(format!(
            "domain ({}, {}) must be a bounded interval",
            domain.0, domain.1
        )));
    }
    Ok(())
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw_position(p: &JumpPosition, rng: &mut ChaCha8Rng) -> f64 {
    match *p {
        JumpPosition::Fixed(x) => x,
        JumpPosition::Uniform(a, b) => a + (b - a) * rng.gen::<f64>(),
    }
}

fn draw_size(s: &JumpSizeLaw, rng: &mut ChaCha8Rng) -> f64 {
    match *s {
        JumpSizeLaw::Fixed(v) => v,
        JumpSizeLaw::Exponential { mean } => mean * rng.sample::<f64, _>(Exp1),
        JumpSizeLaw::Uniform { lo, hi } => lo + (hi - lo) * rng.gen::<f64>(),
    }
}

fn draw_row(row: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (j, p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return j;
        }
    }
    row.len() - 1
}

/// Draws the profile for realization `stream` of the law's ensemble.
pub fn sample_initial_stream(
    law: &InitialLaw,
    domain: (f64, f64),
    stream: u64,
) -> Result<StepFunction> {
    Ok(sample_jumps_stream(law, domain, stream)?.0)
}

/// Draws realization `stream` together with the jumps of the underlying
/// process. For the drift-plus-jumps family the record holds the Poisson
/// jumps only, not the grid steps that discretize the drift.
pub fn sample_jumps_stream(
    law: &InitialLaw,
    domain: (f64, f64),
    stream: u64,
) -> Result<(StepFunction, Vec<JumpRecord>)> {
    law.validate()?;
    check_domain(domain)?;
    let mut rng = stream_rng(law.seed, stream);
    sample_with(&law.kind, domain, &mut rng)
}

/// Single-sample convenience: realization zero of the ensemble.
pub fn sample_initial(law: &InitialLaw, domain: (f64, f64)) -> Result<StepFunction> {
    sample_initial_stream(law, domain, 0)
}

/// Realization zero with its jump record.
pub fn sample_initial_jumps(
    law: &InitialLaw,
    domain: (f64, f64),
) -> Result<(StepFunction, Vec<JumpRecord>)> {
    sample_jumps_stream(law, domain, 0)
}

fn sample_with(
    kind: &LawKind,
    domain: (f64, f64),
    rng: &mut ChaCha8Rng,
) -> Result<(StepFunction, Vec<JumpRecord>)> {
    match kind {
        LawKind::Riemann {
            left,
            right,
            position,
        } => {
            let pos = draw_position(position, rng);
            if left == right {
                let profile = StepFunction::right_continuous(vec![], vec![*left])?;
                return Ok((profile, vec![]));
            }
            let profile = StepFunction::right_continuous(vec![pos], vec![*left, *right])?;
            let jumps = vec![JumpRecord {
                position: pos,
                size: right - left,
            }];
            Ok((profile, jumps))
        }
        LawKind::TwoJump { values, first, gap } => {
            let a = draw_position(first, rng);
            let g = if gap.0 == gap.1 {
                gap.0
            } else {
                gap.0 + (gap.1 - gap.0) * rng.gen::<f64>()
            };
            let b = a + g;
            let profile =
                StepFunction::right_continuous(vec![a, b], vec![values[0], values[1], values[2]])?;
            let jumps = [(a, values[1] - values[0]), (b, values[2] - values[1])]
                .into_iter()
                .filter(|(_, s)| *s != 0.0)
                .map(|(position, size)| JumpRecord { position, size })
                .collect();
            Ok((profile, jumps))
        }
        LawKind::MarkovChain {
            states,
            transition,
            rate,
            start,
        } => {
            let mut idx = match start {
                StartState::Uniform => rng.gen_range(0..states.len()),
                StartState::Fixed(i) => *i,
            };
            let gaps = Exp::new(*rate).map_err(|e| Error::InvalidLaw(e.to_string()))?;
            let mut breakpoints = Vec::new();
            let mut values = vec![states[idx]];
            let mut jumps = Vec::new();
            let mut x = domain.0 + gaps.sample(rng);
            while x < domain.1 {
                let next = draw_row(&transition[idx], rng);
                if next != idx {
                    breakpoints.push(x);
                    values.push(states[next]);
                    jumps.push(JumpRecord {
                        position: x,
                        size: states[next] - states[idx],
                    });
                    idx = next;
                }
                x += gaps.sample(rng);
            }
            Ok((StepFunction::right_continuous(breakpoints, values)?, jumps))
        }
        LawKind::SpectrallyNegative {
            drift,
            intensity,
            sizes,
            step,
        } => {
            let mut jump_points = Vec::new();
            if *intensity > 0.0 {
                let gaps = Exp::new(*intensity).map_err(|e| Error::InvalidLaw(e.to_string()))?;
                let mut x = domain.0 + gaps.sample(rng);
                while x < domain.1 {
                    jump_points.push((x, draw_size(sizes, rng)));
                    x += gaps.sample(rng);
                }
            }
            let mut breakpoints = Vec::new();
            let mut levels: Vec<i64> = vec![0];
            let mut jumps = Vec::new();
            let mut seg_start = domain.0;
            let mut seg_value = 0.0;
            for &(xj, size) in jump_points.iter().chain([(domain.1, 0.0)].iter()) {
                drift_crossings(
                    seg_start,
                    xj,
                    seg_value,
                    *drift,
                    *step,
                    &mut breakpoints,
                    &mut levels,
                );
                seg_value += drift * (xj - seg_start);
                if xj < domain.1 {
                    seg_value -= size;
                    jumps.push(JumpRecord {
                        position: xj,
                        size: -size,
                    });
                    let level = (seg_value / step).round() as i64;
                    if level != *levels.last().expect("never empty") {
                        push_level(&mut breakpoints, &mut levels, xj, level);
                    }
                }
                seg_start = xj;
            }
            let values = levels.iter().map(|&d| d as f64 * step).collect();
            Ok((StepFunction::right_continuous(breakpoints, values)?, jumps))
        }
        LawKind::BrownianPotential {
            variance_rate,
            step,
        } => {
            let psi = brownian_walk(domain, *variance_rate, *step, rng);
            let knots = psi.knots();
            let mut breakpoints = Vec::with_capacity(knots.len().saturating_sub(2));
            let mut values = Vec::with_capacity(knots.len() - 1);
            let mut jumps = Vec::new();
            for w in knots.windows(2) {
                let u = -(w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                if let Some(&prev) = values.last() {
                    breakpoints.push(w[0].0);
                    jumps.push(JumpRecord {
                        position: w[0].0,
                        size: u - prev,
                    });
                }
                values.push(u);
            }
            Ok((StepFunction::right_continuous(breakpoints, values)?, jumps))
        }
    }
}

fn push_level(breakpoints: &mut Vec<f64>, levels: &mut Vec<i64>, x: f64, level: i64) {
    if breakpoints.last().is_some_and(|&b| x <= b) {
        *levels.last_mut().expect("never empty") = level;
    } else {
        breakpoints.push(x);
        levels.push(level);
    }
}

/// Appends the grid-level crossings of a linear segment `value + drift·(x -
/// x0)` on `(x0, x1)`.
fn drift_crossings(
    x0: f64,
    x1: f64,
    value: f64,
    drift: f64,
    step: f64,
    breakpoints: &mut Vec<f64>,
    levels: &mut Vec<i64>,
) {
    if drift == 0.0 {
        return;
    }
    loop {
        let level = *levels.last().expect("never empty");
        let target = if drift > 0.0 {
            (level as f64 + 0.5) * step
        } else {
            (level as f64 - 0.5) * step
        };
        let x = x0 + (target - value) / drift;
        if !(x < x1) {
            return;
        }
        let next = if drift > 0.0 { level + 1 } else { level - 1 };
        push_level(breakpoints, levels, x.max(x0), next);
    }
}

fn brownian_walk(
    domain: (f64, f64),
    variance_rate: f64,
    step: f64,
    rng: &mut ChaCha8Rng,
) -> PiecewiseLinear {
    let cells = (((domain.1 - domain.0) / step).ceil() as usize).max(1);
    let normal = Normal::new(0.0, (variance_rate * step).sqrt()).expect("finite scale");
    let mut knots = Vec::with_capacity(cells + 1);
    let mut value = 0.0;
    knots.push((domain.0, value));
    for k in 1..=cells {
        value += normal.sample(rng);
        knots.push((domain.0 + k as f64 * step, value));
    }
    PiecewiseLinear::new(knots).expect("grid knots are ordered")
}

/// Potential path of realization `stream`: the function whose negative
/// derivative is the sampled velocity profile, anchored to zero at the left
/// end of the domain.
pub fn sample_psi_stream(
    law: &InitialLaw,
    domain: (f64, f64),
    stream: u64,
) -> Result<PiecewiseLinear> {
    law.validate()?;
    check_domain(domain)?;
    let mut rng = stream_rng(law.seed, stream);
    if let LawKind::BrownianPotential {
        variance_rate,
        step,
    } = &law.kind
    {
        return Ok(brownian_walk(domain, *variance_rate, *step, &mut rng));
    }
    let (profile, _) = sample_with(&law.kind, domain, &mut rng)?;
    Ok(integrate_negative(&profile, domain))
}

/// Potential path of realization zero.
pub fn sample_psi(law: &InitialLaw, domain: (f64, f64)) -> Result<PiecewiseLinear> {
    sample_psi_stream(law, domain, 0)
}

/// Piecewise-linear `-∫ u` over the domain, zero at the left end.
pub fn integrate_negative(u: &StepFunction, domain: (f64, f64)) -> PiecewiseLinear {
    let mut knots = vec![(domain.0, 0.0)];
    let mut value = 0.0;
    for (k, &b) in u.breakpoints().iter().enumerate() {
        if b <= domain.0 || b >= domain.1 {
            continue;
        }
        let prev = knots.last().expect("anchored").0;
        value -= u.values()[k] * (b - prev);
        knots.push((b, value));
    }
    let prev = knots.last().expect("anchored").0;
    value -= u.limit_left(domain.1) * (domain.1 - prev);
    knots.push((domain.1, value));
    PiecewiseLinear::new(knots).expect("breakpoints are ordered")
}

/// Maps a profile of lattice values to a resolved front configuration at
/// time zero. Every value must match a flux-table state to within a
/// relative 1e-9.
pub fn index_profile(table: &FluxTable, profile: &StepFunction) -> Result<FrontList> {
    let states = profile
        .values()
        .iter()
        .map(|&v| state_index(table, v))
        .collect::<Result<Vec<usize>>>()?;
    FrontList::from_profile(table, profile.breakpoints(), &states)
}

fn state_index(table: &FluxTable, value: f64) -> Result<usize> {
    let states = table.states();
    let i = states.partition_point(|&s| s < value);
    let scale = states[states.len() - 1].abs().max(states[0].abs()).max(1.0);
    for j in [i.saturating_sub(1), i.min(states.len() - 1)] {
        if (states[j] - value).abs() <= 1e-9 * scale {
            return Ok(j);
        }
    }
    Err(Error::DomainMismatch(format!(
        "value {value} is not a lattice state"
    )))
}

/// Draws `size` independent realizations of a law and carries them through
/// the front-tracking solver. Realization `i` always uses generator stream
/// `i`, so the ensemble is reproducible regardless of worker count.
#[derive(Debug, Clone)]
pub struct EnsembleRunner {
    pub law: InitialLaw,
    pub table: FluxTable,
    pub domain: (f64, f64),
    pub size: usize,
}

impl EnsembleRunner {
    pub fn profiles(&self) -> Result<Vec<StepFunction>> {
        (0..self.size)
            .into_par_iter()
            .map(|i| sample_initial_stream(&self.law, self.domain, i as u64))
            .collect()
    }

    /// Resolved front configurations at time zero.
    pub fn front_lists(&self) -> Result<Vec<FrontList>> {
        (0..self.size)
            .into_par_iter()
            .map(|i| {
                let profile = sample_initial_stream(&self.law, self.domain, i as u64)?;
                index_profile(&self.table, &profile)
            })
            .collect()
    }

    /// Ensemble evolved to time `t`.
    pub fn evolved(&self, t: f64) -> Result<Vec<FrontList>> {
        let lists = self.front_lists()?;
        lists
            .into_par_iter()
            .map(|list| list.evolve(&self.table, t))
            .collect()
    }
}
