//! Exact front tracking for scalar conservation laws whose flux is
//! piecewise linear and convex over a fixed lattice of states. Solutions
//! are piecewise constant in space with states drawn from the lattice;
//! every discontinuity travels at the chord speed of the flux between its
//! flanking states, so the evolution is a finite sequence of front
//! collisions, each resolved exactly by the Riemann solution of the
//! outermost states. The number of fronts never increases.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::measures::StepFunction;

const POSITION_SLACK: f64 = 1e-9;

/// Convex piecewise linear flux sampled on a strictly increasing lattice
/// of states.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxTable {
    states: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl FluxTable {
    pub fn new(states: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::Invalid(format!(
                "flux table needs at least two states, got {}",
                states.len()
            )));
        }
        if states.len() != values.len() {
            return Err(Error::Invalid(format!(
                "{} states against {} flux values",
                states.len(),
                values.len()
            )));
        }
        if states.iter().any(|s| !s.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite flux table entry".into()));
        }
        if states.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Unsorted("flux states must strictly increase".into()));
        }
        let slopes: Vec<f64> = states
            .windows(2)
            .zip(values.windows(2))
            .map(|(s, v)| (v[1] - v[0]) / (s[1] - s[0]))
            .collect();
        if slopes.windows(2).any(|w| w[1] < w[0] - 1e-12) {
            return Err(Error::NonConvex("flux chords must be nondecreasing".into()));
        }
        Ok(FluxTable {
            states,
            values,
            slopes,
        })
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Slopes of the flux segments between consecutive lattice states.
    pub fn segment_slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Chord slope of the flux between two lattice states.
    pub fn chord(&self, i: usize, j: usize) -> f64 {
        (self.values[i] - self.values[j]) / (self.states[i] - self.states[j])
    }

    fn check_index(&self, idx: usize) -> Result<()> {
        if idx >= self.states.len() {
            return Err(Error::OutOfDomain(format!(
                "state index {idx} exceeds lattice of {} states",
                self.states.len()
            )));
        }
        Ok(())
    }
}

/// One moving discontinuity: lattice state indices on either side and the
/// chord speed between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Front {
    pub position: f64,
    pub left: usize,
    pub right: usize,
    pub speed: f64,
}

/// Exact solution of a single Riemann problem at `x`: one shock when the
/// left state is above the right, a fan of unit lattice steps moving at
/// the segment slopes when below, nothing when equal.
pub fn riemann_solve(table: &FluxTable, left: usize, right: usize, x: f64) -> Result<Vec<Front>> {
    table.check_index(left)?;
    table.check_index(right)?;
    if left == right {
        return Ok(Vec::new());
    }
    if left > right {
        return Ok(vec![Front {
            position: x,
            left,
            right,
            speed: table.chord(left, right),
        }]);
    }
    Ok((left..right)
        .map(|k| Front {
            position: x,
            left: k,
            right: k + 1,
            speed: table.slopes[k],
        })
        .collect())
}

/// Piecewise constant solution state at a fixed time: fronts ordered left
/// to right with matching states between neighbors.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontList {
    time: f64,
    fronts: Vec<Front>,
    background: usize,
}

impl FrontList {
    /// Builds the state at time zero from a step profile: `states` has one
    /// more entry than `positions`, and every jump is resolved into its
    /// Riemann solution on the spot.
    pub fn from_profile(table: &FluxTable, positions: &[f64], states: &[usize]) -> Result<Self> {
        if states.len() != positions.len() + 1 {
            return Err(Error::Invalid(format!(
                "{} states against {} jump positions",
                states.len(),
                positions.len()
            )));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Unsorted(
                "jump positions must strictly increase".into(),
            ));
        }
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("non-finite jump position".into()));
        }
        let mut fronts = Vec::new();
        for (k, &x) in positions.iter().enumerate() {
            fronts.extend(riemann_solve(table, states[k], states[k + 1], x)?);
        }
        Ok(FrontList {
            time: 0.0,
            fronts,
            background: states[0],
        })
    }

    /// State index seen at minus infinity; also the constant state when no
    /// fronts remain.
    pub fn leftmost_state(&self) -> usize {
        self.background
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn fronts(&self) -> &[Front] {
        &self.fronts
    }

    /// One-sided states at `x` as lattice indices.
    pub fn sample_indices(&self, x: f64) -> (usize, usize) {
        if self.fronts.is_empty() {
            return (self.background, self.background);
        }
        let strictly_before = self.fronts.partition_point(|f| f.position < x);
        let up_to = self.fronts.partition_point(|f| f.position <= x);
        let left_state = if strictly_before == 0 {
            self.fronts[0].left
        } else {
            self.fronts[strictly_before - 1].right
        };
        let right_state = if up_to == 0 {
            self.fronts[0].left
        } else {
            self.fronts[up_to - 1].right
        };
        (left_state, right_state)
    }

    /// One-sided states at `x` as lattice values.
    pub fn sample(&self, table: &FluxTable, x: f64) -> (f64, f64) {
        let (l, r) = self.sample_indices(x);
        (table.states[l], table.states[r])
    }

    pub fn total_variation(&self, table: &FluxTable) -> f64 {
        self.fronts
            .iter()
            .map(|f| (table.states[f.left] - table.states[f.right]).abs())
            .sum()
    }

    /// Worst deviation of any front speed from the flux chord between its
    /// flanking states.
    pub fn rh_residual(&self, table: &FluxTable) -> f64 {
        self.fronts
            .iter()
            .map(|f| (f.speed - table.chord(f.left, f.right)).abs())
            .fold(0.0, f64::max)
    }

    /// The solution as a right-continuous step function of lattice values;
    /// coincident fronts collapse to their outermost jump.
    pub fn step_profile(&self, table: &FluxTable) -> StepFunction {
        if self.fronts.is_empty() {
            return StepFunction::right_continuous(vec![], vec![table.states[self.background]])
                .expect("constant");
        }
        let mut breakpoints: Vec<f64> = Vec::new();
        let mut values = vec![table.states[self.fronts[0].left]];
        for f in &self.fronts {
            if breakpoints.last().is_some_and(|&b| f.position <= b) {
                *values.last_mut().expect("one value per region") = table.states[f.right];
            } else {
                breakpoints.push(f.position);
                values.push(table.states[f.right]);
            }
        }
        StepFunction::right_continuous(breakpoints, values).expect("front positions are ordered")
    }

    /// Evolves to time `t` through every intervening front collision.
    pub fn evolve(&self, table: &FluxTable, t: f64) -> Result<Self> {
        if t < self.time {
            return Err(Error::TimeReversed {
                system: self.time,
                requested: t,
            });
        }
        for f in &self.fronts {
            table.check_index(f.left)?;
            table.check_index(f.right)?;
        }
        let mut tracker = Tracker::new(self, t);
        tracker.run(table);
        Ok(tracker.finish(t))
    }
}

struct Slot {
    front: Front,
    alive: bool,
    prev: Option<usize>,
    next: Option<usize>,
}

#[derive(PartialEq)]
struct Event {
    time: f64,
    x: f64,
    left: usize,
    right: usize,
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.x.total_cmp(&other.x))
            .then(self.left.cmp(&other.left))
    }
}

struct Tracker {
    time: f64,
    horizon: f64,
    slots: Vec<Slot>,
    head: Option<usize>,
    queue: BinaryHeap<Reverse<Event>>,
    background: usize,
}

impl Tracker {
    fn new(list: &FrontList, horizon: f64) -> Self {
        let n = list.fronts.len();
        let slots: Vec<Slot> = list
            .fronts
            .iter()
            .enumerate()
            .map(|(i, &front)| Slot {
                front,
                alive: true,
                prev: i.checked_sub(1),
                next: (i + 1 < n).then_some(i + 1),
            })
            .collect();
        let mut tracker = Tracker {
            time: list.time,
            horizon,
            slots,
            head: (n > 0).then_some(0),
            queue: BinaryHeap::new(),
            background: list.background,
        };
        for i in 0..n.saturating_sub(1) {
            tracker.schedule(i, i + 1);
        }
        tracker
    }

    fn schedule(&mut self, left: usize, right: usize) {
        let (a, b) = (&self.slots[left].front, &self.slots[right].front);
        let closing = a.speed - b.speed;
        if closing <= 1e-15 * a.speed.abs().max(b.speed.abs()).max(1.0) {
            return;
        }
        let dt = ((b.position - a.position) / closing).max(0.0);
        let time = self.time + dt;
        if time > self.horizon {
            return;
        }
        self.queue.push(Reverse(Event {
            time,
            x: a.position + a.speed * dt,
            left,
            right,
        }));
    }

    fn advance(&mut self, t: f64) {
        let dt = t - self.time;
        if dt == 0.0 {
            return;
        }
        for slot in self.slots.iter_mut().filter(|s| s.alive) {
            slot.front.position += slot.front.speed * dt;
        }
        self.time = t;
    }

    fn run(&mut self, table: &FluxTable) {
        while let Some(Reverse(event)) = self.queue.pop() {
            let valid = self.slots[event.left].alive
                && self.slots[event.right].alive
                && self.slots[event.left].next == Some(event.right);
            if !valid {
                continue;
            }
            self.advance(event.time);
            self.collide(table, event.left, event.right);
        }
    }

    fn collide(&mut self, table: &FluxTable, left: usize, right: usize) {
        let meeting = 0.5 * (self.slots[left].front.position + self.slots[right].front.position);
        let slack = POSITION_SLACK * meeting.abs().max(1.0);
        let mut first = left;
        while let Some(p) = self.slots[first].prev {
            if (self.slots[p].front.position - meeting).abs() <= slack {
                first = p;
            } else {
                break;
            }
        }
        let mut last = right;
        while let Some(nx) = self.slots[last].next {
            if (self.slots[nx].front.position - meeting).abs() <= slack {
                last = nx;
            } else {
                break;
            }
        }
        let outer_left = self.slots[first].front.left;
        let outer_right = self.slots[last].front.right;
        let before = self.slots[first].prev;
        let after = self.slots[last].next;

        let mut removed = 0usize;
        let mut cursor = Some(first);
        while let Some(i) = cursor {
            self.slots[i].alive = false;
            removed += 1;
            cursor = if i == last { None } else { self.slots[i].next };
        }

        let pieces =
            riemann_solve(table, outer_left, outer_right, meeting).expect("states stay in range");
        debug_assert!(
            pieces.len() < removed,
            "front count must drop at collisions"
        );
        let mut ids = Vec::with_capacity(pieces.len());
        for front in pieces {
            self.slots.push(Slot {
                front,
                alive: true,
                prev: None,
                next: None,
            });
            ids.push(self.slots.len() - 1);
        }

        let mut chain = Vec::with_capacity(ids.len() + 2);
        if let Some(b) = before {
            chain.push(b);
        }
        chain.extend(&ids);
        if let Some(a) = after {
            chain.push(a);
        }
        for w in 1..chain.len() {
            let (a, b) = (chain[w - 1], chain[w]);
            self.slots[a].next = Some(b);
            self.slots[b].prev = Some(a);
        }
        if before.is_none() {
            self.head = chain.first().copied();
            if let Some(&h) = chain.first() {
                self.slots[h].prev = None;
            }
        }
        if after.is_none() {
            if let Some(&tail) = chain.last() {
                self.slots[tail].next = None;
            }
        }
        for w in 1..chain.len() {
            self.schedule(chain[w - 1], chain[w]);
        }
    }

    fn finish(mut self, t: f64) -> FrontList {
        self.advance(t);
        let mut fronts = Vec::new();
        let mut cursor = self.head;
        while let Some(i) = cursor {
            debug_assert!(self.slots[i].alive);
            fronts.push(self.slots[i].front);
            cursor = self.slots[i].next;
        }
        debug_assert!(fronts
            .windows(2)
            .all(|w| w[0].right == w[1].left && w[0].position <= w[1].position + 1e-9));
        FrontList {
            time: t,
            fronts,
            background: self.background,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn burgers_table(states: Vec<f64>) -> FluxTable {
        let values = states.iter().map(|u| 0.5 * u * u).collect();
        FluxTable::new(states, values).unwrap()
    }

    #[test]
    fn table_validation() {
        assert!(FluxTable::new(vec![0.0, 1.0], vec![0.0, 0.5]).is_ok());
        assert!(matches!(
            FluxTable::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.5]),
            Err(Error::NonConvex(_))
        ));
        assert!(FluxTable::new(vec![0.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(FluxTable::new(vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn riemann_shock_speed_is_the_chord() {
        let table = burgers_table(vec![0.0, 1.0]);
        let fronts = riemann_solve(&table, 1, 0, 0.0).unwrap();
        assert_eq!(fronts.len(), 1);
        assert!((fronts[0].speed - 0.5).abs() < 1e-15);
    }

    #[test]
    fn riemann_fan_moves_at_segment_slopes() {
        let table = FluxTable::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.0, 1.0]).unwrap();
        let fronts = riemann_solve(&table, 0, 2, 1.0).unwrap();
        assert_eq!(fronts.len(), 2);
        assert_eq!((fronts[0].left, fronts[0].right), (0, 1));
        assert!((fronts[0].speed - 0.0).abs() < 1e-15);
        assert_eq!((fronts[1].left, fronts[1].right), (1, 2));
        assert!((fronts[1].speed - 1.0).abs() < 1e-15);
        assert!(riemann_solve(&table, 1, 1, 0.0).unwrap().is_empty());
        assert!(riemann_solve(&table, 3, 0, 0.0).is_err());
    }

    #[test]
    fn two_shocks_merge_into_one() {
        let table = burgers_table(vec![0.0, 1.0, 2.0]);
        let list = FrontList::from_profile(&table, &[-1.0, 0.0], &[2, 1, 0]).unwrap();
        assert_eq!(list.fronts().len(), 2);
        let before = list.evolve(&table, 0.9).unwrap();
        assert_eq!(before.fronts().len(), 2);
        let after = list.evolve(&table, 1.0).unwrap();
        assert_eq!(after.fronts().len(), 1);
        assert!((after.fronts()[0].position - 0.5).abs() < 1e-12);
        assert!((after.fronts()[0].speed - 1.0).abs() < 1e-15);
        let later = after.evolve(&table, 3.0).unwrap();
        assert!((later.fronts()[0].position - 2.5).abs() < 1e-12);
    }

    #[test]
    fn triple_simultaneous_merge_telescopes() {
        let table = burgers_table(vec![0.0, 1.0, 2.0, 3.0]);
        let list = FrontList::from_profile(&table, &[0.0, 1.0, 2.0], &[3, 2, 1, 0]).unwrap();
        let after = list.evolve(&table, 1.0).unwrap();
        assert_eq!(after.fronts().len(), 1);
        assert!((after.fronts()[0].position - 2.5).abs() < 1e-12);
        assert!((after.fronts()[0].speed - 1.5).abs() < 1e-15);
        assert_eq!((after.fronts()[0].left, after.fronts()[0].right), (3, 0));
    }

    #[test]
    fn shock_absorbs_part_of_a_fan() {
        let table = burgers_table(vec![0.0, 1.0, 2.0]);
        let list = FrontList::from_profile(&table, &[-1.0, 1.0], &[2, 0, 2]).unwrap();
        assert_eq!(list.fronts().len(), 3);
        let after = list.evolve(&table, 5.0).unwrap();
        assert_eq!(after.fronts().len(), 2);
        assert!((after.total_variation(&table) - 2.0).abs() < 1e-12);
        assert!(after.rh_residual(&table) < 1e-12);
        let naive_merge_time = 4.0;
        let merged = list.evolve(&table, naive_merge_time).unwrap();
        assert!((merged.fronts()[0].position - 3.0).abs() < 1e-12);
        assert_eq!((merged.fronts()[0].left, merged.fronts()[0].right), (2, 1));
    }

    #[test]
    fn sampling_reads_one_sided_states() {
        let table = burgers_table(vec![0.0, 1.0, 2.0]);
        let list = FrontList::from_profile(&table, &[-1.0, 0.0], &[2, 1, 0]).unwrap();
        assert_eq!(list.sample(&table, -2.0), (2.0, 2.0));
        assert_eq!(list.sample(&table, -1.0), (2.0, 1.0));
        assert_eq!(list.sample(&table, -0.5), (1.0, 1.0));
        assert_eq!(list.sample(&table, 0.0), (1.0, 0.0));
        assert_eq!(list.sample(&table, 4.0), (0.0, 0.0));
    }

    #[test]
    fn step_profile_collapses_coincident_fronts() {
        let table = burgers_table(vec![0.0, 1.0, 2.0]);
        let list = FrontList::from_profile(&table, &[0.0], &[0, 2]).unwrap();
        let profile = list.step_profile(&table);
        assert_eq!(profile.breakpoints(), &[0.0]);
        assert_eq!(profile.values(), &[0.0, 2.0]);
        let spread = list.evolve(&table, 1.0).unwrap();
        let profile = spread.step_profile(&table);
        assert_eq!(profile.breakpoints(), &[0.5, 1.5]);
        assert_eq!(profile.values(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn burgers_lattice_profile_saturates_entropy_bound() {
        let table = burgers_table((0..=4).map(f64::from).collect());
        let list = FrontList::from_profile(&table, &[0.0], &[0, 4]).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let profile = list.evolve(&table, t).unwrap().step_profile(&table);
            let worst = crate::genpot::entropy_check(&profile, t).unwrap();
            assert!(worst.abs() < 1e-12, "t={t}: {worst}");
        }
    }

    #[test]
    fn decreasing_profile_matches_particle_dynamics() {
        let states = vec![0.0, 2.0, 3.0, 5.0];
        let table = burgers_table(states.clone());
        let positions = vec![-2.0, 0.0, 1.0];
        let indices = vec![3, 2, 1, 0];
        let list = FrontList::from_profile(&table, &positions, &indices).unwrap();

        let masses: Vec<f64> = indices
            .windows(2)
            .map(|w| states[w[0]] - states[w[1]])
            .collect();
        let velocities: Vec<f64> = indices
            .windows(2)
            .map(|w| 0.5 * (states[w[0]] + states[w[1]]))
            .collect();
        let sys = crate::sticky::ParticleSystem::new(&masses, &positions, &velocities).unwrap();

        for k in 0..=20 {
            let t = 0.2 * k as f64;
            let evolved_fronts = list.evolve(&table, t).unwrap();
            let evolved_bodies = sys.evolve(t).unwrap();
            assert_eq!(evolved_fronts.fronts().len(), evolved_bodies.len(), "t={t}");
            for (front, body) in evolved_fronts.fronts().iter().zip(evolved_bodies.bodies()) {
                assert!((front.position - body.position).abs() < 1e-10, "t={t}");
                let drop = table.states[front.left] - table.states[front.right];
                assert!((drop - body.mass).abs() < 1e-12);
                assert!((front.speed - body.velocity).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_profiles_keep_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for trial in 0..60 {
            let k = rng.gen_range(3..=8);
            let mut states: Vec<f64> = vec![rng.gen_range(-3.0..-2.0)];
            for _ in 1..k {
                let next = states.last().unwrap() + rng.gen_range(0.2..1.5);
                states.push(next);
            }
            let table = burgers_table(states);
            let jumps = rng.gen_range(1..=12);
            let mut positions: Vec<f64> = vec![rng.gen_range(-5.0..-4.0)];
            for _ in 1..jumps {
                let next = positions.last().unwrap() + rng.gen_range(0.1..1.0);
                positions.push(next);
            }
            let mut indices = vec![rng.gen_range(0..k)];
            for _ in 0..jumps {
                let prev = *indices.last().unwrap();
                let mut next = rng.gen_range(0..k);
                if next == prev {
                    next = (next + 1) % k;
                }
                indices.push(next);
            }
            let list = FrontList::from_profile(&table, &positions, &indices).unwrap();
            let mut variation = list.total_variation(&table);
            let mut count = list.fronts().len();
            for step in 1..=6 {
                let evolved = list.evolve(&table, step as f64).unwrap();
                let fronts = evolved.fronts();
                assert!(
                    fronts.windows(2).all(|w| w[0].right == w[1].left),
                    "trial {trial}: state chain broken"
                );
                assert!(fronts
                    .windows(2)
                    .all(|w| w[0].position <= w[1].position + 1e-9));
                assert!(evolved.rh_residual(&table) < 1e-12);
                let tv = evolved.total_variation(&table);
                assert!(tv <= variation + 1e-9, "trial {trial}: variation grew");
                assert!(fronts.len() <= count, "trial {trial}: front count grew");
                variation = tv;
                count = fronts.len();
            }
        }
    }

    #[test]
    fn evolve_rejects_reversed_time() {
        let table = burgers_table(vec![0.0, 1.0]);
        let list = FrontList::from_profile(&table, &[0.0], &[1, 0]).unwrap();
        let later = list.evolve(&table, 1.0).unwrap();
        assert!(matches!(
            later.evolve(&table, 0.5),
            Err(Error::TimeReversed { .. })
        ));
    }
}
