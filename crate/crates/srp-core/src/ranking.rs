//! Exact N-particle move-to-front simulation with lazy position queries.
//!
//! Positions never replay list moves. A particle that has not jumped by t
//! sits at its initial rank plus the number of initially-lower particles
//! that have jumped; a particle that has jumped sits at 1 plus the number of
//! particles whose last jump is more recent. Both counts are rank queries
//! over jump times, answered in O(log N) from two Fenwick trees that advance
//! event-by-event with the query time (and rebuild when time moves
//! backwards).

use crate::intensity::{IntensityError, MixtureSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RankingError {
    #[error("system needs at least one particle")]
    EmptySystem,
    #[error("block layout needs at least as many particles as classes ({n} < {k})")]
    BlocksTooFewParticles { n: usize, k: usize },
    #[error("query time {t} outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },
    #[error("particle index {i} out of range (N = {n})")]
    BadParticle { i: usize, n: usize },
    #[error("grid value {0} outside [0,1)")]
    BadGridValue(f64),
    #[error(transparent)]
    Intensity(#[from] IntensityError),
}

/// How classes are laid out over the initial ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Classes interleaved evenly, so the class-α initial tail is r_α(1−y).
    Proportional,
    /// Contiguous rank blocks in class order.
    Blocks,
}

/// Binary indexed tree over 1-based positions.
struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    fn new(len: usize) -> Self {
        Fenwick {
            tree: vec![0; len + 1],
        }
    }

    fn add(&mut self, mut i: usize, delta: i32) {
        while i < self.tree.len() {
            self.tree[i] = (self.tree[i] as i64 + delta as i64) as u32;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over positions 1..=i.
    fn prefix(&self, mut i: usize) -> u32 {
        let mut sum = 0;
        while i > 0 {
            sum += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        sum
    }

    fn clear(&mut self) {
        self.tree.fill(0);
    }
}

/// Query-time cursor: events[..next_event] are applied.
struct QueryEpoch {
    next_event: usize,
    /// marks the initial ranks of particles that have jumped
    jumped_ranks: Fenwick,
    /// marks, per global event slot, whether it is some particle's most
    /// recent jump
    active_slots: Fenwick,
    /// per particle: active event slot + 1, or 0 if not jumped
    active_of: Vec<u32>,
    k_jumped: usize,
}

/// The N-particle system with all jump streams pre-sampled to the horizon.
pub struct ParticleSystem {
    n: usize,
    horizon: f64,
    mixture: MixtureSpec,
    layout: Layout,
    class_of: Vec<u32>,
    initial_rank: Vec<u32>,
    jump_times: Vec<Vec<f64>>,
    /// all jumps ordered by (time, particle); ties (zero-probability, but
    /// possible in floating point) resolve by particle index, and a later
    /// slot always means a more recent jump
    events: Vec<(f64, u32)>,
    /// per particle, the global slot of each of its jumps
    event_slots: Vec<Vec<u32>>,
    /// the event times alone, sorted (the slot order)
    event_times: Vec<f64>,
    first_jumps_sorted: Vec<f64>,
    epoch: Mutex<QueryEpoch>,
}

/// One evaluation of the system at a fixed time.
pub struct EmpiricalSnapshot {
    pub time: f64,
    /// Y_i = (X_i − 1)/N per particle
    pub scaled_positions: Vec<f64>,
    /// fraction of particles that have jumped by `time`
    pub boundary_fraction: f64,
    /// per class α, U_α^N(y) = #{class-α particles with Y_i ≥ y}/N on `y_grid`
    pub class_tails: Vec<Vec<f64>>,
    pub y_grid: Vec<f64>,
}

/// Total-jump counting process S^N and its right-continuous inverse s^N.
pub struct TotalJumps<'a> {
    times: &'a [f64],
}

impl TotalJumps<'_> {
    /// S^N(t): number of jump events in (0, t].
    pub fn count_at(&self, t: f64) -> usize {
        self.times.partition_point(|&u| u <= t)
    }

    /// s^N(u) = inf{s : S^N(s) > u}; `None` once u reaches the total count
    /// on the horizon.
    pub fn inverse(&self, u: f64) -> Option<f64> {
        let k = u.max(0.0).floor() as usize;
        self.times.get(k).copied()
    }

    pub fn total(&self) -> usize {
        self.times.len()
    }
}

/// Largest-remainder class counts n_α with Σ n_α = n.
fn class_counts(weights: &[f64], n: usize) -> Vec<usize> {
    let mut counts: Vec<usize> = weights.iter().map(|r| (r * n as f64).floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = weights[a] * n as f64 - counts[a] as f64;
        let fb = weights[b] * n as f64 - counts[b] as f64;
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &alpha in order.iter().take(n - assigned) {
        counts[alpha] += 1;
    }
    counts
}

/// Class per initial rank under the proportional layout: walk the ranks
/// and always serve the class whose quota is furthest behind.
fn proportional_assignment(weights: &[f64], counts: &[usize], n: usize) -> Vec<u32> {
    let k = weights.len();
    let mut assigned = vec![0usize; k];
    let mut out = Vec::with_capacity(n);
    for j in 1..=n {
        let mut best = usize::MAX;
        let mut best_deficit = f64::NEG_INFINITY;
        for alpha in 0..k {
            if assigned[alpha] >= counts[alpha] {
                continue;
            }
            let deficit = weights[alpha] * j as f64 - assigned[alpha] as f64;
            if deficit > best_deficit {
                best_deficit = deficit;
                best = alpha;
            }
        }
        assigned[best] += 1;
        out.push(best as u32);
    }
    out
}

impl ParticleSystem {
    /// Builds the system: assigns classes to initial ranks (largest-remainder
    /// counts, interleaved or in blocks), then pre-samples every particle's
    /// jump stream to the horizon. Particle i has initial rank i+1; its
    /// stream is ChaCha stream i+1 of `seed`, so systems are reproducible
    /// and particles independent regardless of thread count.
    pub fn init(
        n: usize,
        mixture: &MixtureSpec,
        layout: Layout,
        horizon: f64,
        seed: u64,
    ) -> Result<Self, RankingError> {
        if n == 0 {
            return Err(RankingError::EmptySystem);
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(IntensityError::BadHorizon(horizon).into());
        }
        let k = mixture.n_classes();
        if layout == Layout::Blocks && n < k {
            return Err(RankingError::BlocksTooFewParticles { n, k });
        }
        let weights: Vec<f64> = mixture.atoms().iter().map(|a| a.weight).collect();
        let counts = class_counts(&weights, n);
        let class_of: Vec<u32> = match layout {
            Layout::Proportional => proportional_assignment(&weights, &counts, n),
            Layout::Blocks => {
                let mut v = Vec::with_capacity(n);
                for (alpha, &c) in counts.iter().enumerate() {
                    v.extend(std::iter::repeat(alpha as u32).take(c));
                }
                v
            }
        };

        let jump_times: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64 + 1);
                mixture.atoms()[class_of[i] as usize]
                    .intensity
                    .sample_jump_times(horizon, &mut rng)
                    .expect("horizon validated")
            })
            .collect();

        Ok(Self::assemble(mixture.clone(), layout, horizon, class_of, jump_times))
    }

    /// Builds the system from explicit jump streams (sorted, in (0, horizon]).
    /// Lets tests and replays pin the randomness exactly.
    pub fn from_streams(
        mixture: &MixtureSpec,
        layout: Layout,
        horizon: f64,
        class_of: Vec<u32>,
        jump_times: Vec<Vec<f64>>,
    ) -> Result<Self, RankingError> {
        if class_of.is_empty() {
            return Err(RankingError::EmptySystem);
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(IntensityError::BadHorizon(horizon).into());
        }
        assert_eq!(class_of.len(), jump_times.len());
        for ts in &jump_times {
            for (j, &t) in ts.iter().enumerate() {
                assert!(t > 0.0 && t <= horizon, "jump time {t} outside (0, {horizon}]");
                assert!(j == 0 || ts[j - 1] < t, "jump times must increase");
            }
        }
        Ok(Self::assemble(mixture.clone(), layout, horizon, class_of, jump_times))
    }

    fn assemble(
        mixture: MixtureSpec,
        layout: Layout,
        horizon: f64,
        class_of: Vec<u32>,
        jump_times: Vec<Vec<f64>>,
    ) -> Self {
        let n = class_of.len();
        let mut events: Vec<(f64, u32)> = Vec::new();
        for (i, times) in jump_times.iter().enumerate() {
            events.extend(times.iter().map(|&t| (t, i as u32)));
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut event_slots: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (slot, &(_, i)) in events.iter().enumerate() {
            event_slots[i as usize].push(slot as u32);
        }
        let event_times: Vec<f64> = events.iter().map(|&(t, _)| t).collect();

        let mut first_jumps_sorted: Vec<f64> = jump_times
            .iter()
            .filter_map(|ts| ts.first().copied())
            .collect();
        first_jumps_sorted.sort_by(f64::total_cmp);

        let epoch = QueryEpoch {
            next_event: 0,
            jumped_ranks: Fenwick::new(n),
            active_slots: Fenwick::new(events.len()),
            active_of: vec![0; n],
            k_jumped: 0,
        };

        ParticleSystem {
            n,
            horizon,
            mixture,
            layout,
            class_of,
            initial_rank: (1..=n as u32).collect(),
            jump_times,
            events,
            event_slots,
            event_times,
            first_jumps_sorted,
            epoch: Mutex::new(epoch),
        }
    }

    pub fn n_particles(&self) -> usize {
        self.n
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn mixture(&self) -> &MixtureSpec {
        &self.mixture
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn class_of(&self) -> &[u32] {
        &self.class_of
    }

    pub fn jump_times_of(&self, i: usize) -> &[f64] {
        &self.jump_times[i]
    }

    /// All jump events ordered by (time, particle index).
    pub fn events(&self) -> &[(f64, u32)] {
        &self.events
    }

    fn check_time(&self, t: f64) -> Result<(), RankingError> {
        if !(0.0 <= t && t <= self.horizon) {
            return Err(RankingError::TimeOutOfRange {
                t,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    fn advance_epoch<'a>(
        &self,
        guard: &'a mut QueryEpoch,
        t: f64,
    ) {
        // time moved backwards: start the replay over
        if guard
            .next_event
            .checked_sub(1)
            .map_or(false, |last| self.events[last].0 > t)
        {
            guard.next_event = 0;
            guard.jumped_ranks.clear();
            guard.active_slots.clear();
            guard.active_of.fill(0);
            guard.k_jumped = 0;
        }
        while guard.next_event < self.events.len() && self.events[guard.next_event].0 <= t {
            let slot = guard.next_event;
            let (_, p) = self.events[slot];
            let p = p as usize;
            match guard.active_of[p] {
                0 => {
                    guard.jumped_ranks.add(self.initial_rank[p] as usize, 1);
                    guard.k_jumped += 1;
                }
                prev => guard.active_slots.add(prev as usize, -1),
            }
            guard.active_slots.add(slot + 1, 1);
            guard.active_of[p] = (slot + 1) as u32;
            guard.next_event += 1;
        }
    }

    /// Rank of particle i at time t, in 1..=N.
    pub fn position_at(&self, i: usize, t: f64) -> Result<usize, RankingError> {
        self.check_time(t)?;
        if i >= self.n {
            return Err(RankingError::BadParticle { i, n: self.n });
        }
        let mut guard = self.epoch.lock().unwrap();
        self.advance_epoch(&mut guard, t);
        let last = self.jump_times[i].partition_point(|&u| u <= t);
        if last == 0 {
            // initial rank plus initially-lower particles that have jumped
            let x = self.initial_rank[i] as usize;
            let lower_jumped = guard.k_jumped - guard.jumped_ranks.prefix(x) as usize;
            Ok(x + lower_jumped)
        } else {
            // 1 plus particles whose last jump is more recent
            let slot = self.event_slots[i][last - 1] as usize;
            let more_recent = guard.k_jumped - guard.active_slots.prefix(slot + 1) as usize;
            Ok(1 + more_recent)
        }
    }

    /// Y_C^N(t): fraction of particles whose first jump is ≤ t.
    pub fn boundary_fraction(&self, t: f64) -> Result<f64, RankingError> {
        self.check_time(t)?;
        let jumped = self.first_jumps_sorted.partition_point(|&u| u <= t);
        Ok(jumped as f64 / self.n as f64)
    }

    /// Full snapshot at time t: every scaled position plus the per-class
    /// empirical tails on `y_grid`, all from one pass over the particles.
    pub fn snapshot(&self, t: f64, y_grid: &[f64]) -> Result<EmpiricalSnapshot, RankingError> {
        self.check_time(t)?;
        if let Some(&y) = y_grid.iter().find(|&&y| !(0.0..1.0).contains(&y)) {
            return Err(RankingError::BadGridValue(y));
        }
        let mut guard = self.epoch.lock().unwrap();
        self.advance_epoch(&mut guard, t);

        // jumped particles rank 1..K by descending last-jump slot, the rest
        // keep their initial order at K+1..N
        let mut jumped: Vec<(u32, u32)> = (0..self.n)
            .filter(|&p| guard.active_of[p] > 0)
            .map(|p| (guard.active_of[p], p as u32))
            .collect();
        jumped.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let k_jumped = jumped.len();
        drop(guard);

        let mut positions = vec![0usize; self.n];
        for (rank0, &(_, p)) in jumped.iter().enumerate() {
            positions[p as usize] = rank0 + 1;
        }
        let mut next = k_jumped + 1;
        for p in 0..self.n {
            if positions[p] == 0 {
                positions[p] = next;
                next += 1;
            }
        }

        let n = self.n as f64;
        let scaled_positions: Vec<f64> = positions.iter().map(|&x| (x as f64 - 1.0) / n).collect();

        let k_classes = self.mixture.n_classes();
        let mut per_class: Vec<Vec<f64>> = vec![Vec::new(); k_classes];
        for p in 0..self.n {
            per_class[self.class_of[p] as usize].push(scaled_positions[p]);
        }
        let class_tails = per_class
            .into_iter()
            .map(|mut ys| {
                ys.sort_by(f64::total_cmp);
                y_grid
                    .iter()
                    .map(|&y| (ys.len() - ys.partition_point(|&v| v < y)) as f64 / n)
                    .collect()
            })
            .collect();

        Ok(EmpiricalSnapshot {
            time: t,
            scaled_positions,
            boundary_fraction: k_jumped as f64 / n,
            class_tails,
            y_grid: y_grid.to_vec(),
        })
    }

    /// Per-class empirical tails U_α^N(y,t) on the grid.
    pub fn empirical_tail(&self, t: f64, y_grid: &[f64]) -> Result<Vec<Vec<f64>>, RankingError> {
        Ok(self.snapshot(t, y_grid)?.class_tails)
    }

    /// The total-jump process S^N and its inverse s^N.
    pub fn total_jumps(&self) -> TotalJumps<'_> {
        TotalJumps {
            times: &self.event_times,
        }
    }
}

/// Reference dynamics: an explicit ranked list replaying every event with an
/// O(N) move-to-front. Ground truth for the lazy queries at small N.
pub struct ReferenceList {
    order: Vec<u32>,
}

impl ReferenceList {
    pub fn new(n: usize) -> Self {
        ReferenceList {
            order: (0..n as u32).collect(),
        }
    }

    /// Particle p jumps to the front.
    pub fn apply_jump(&mut self, p: u32) {
        let idx = self.order.iter().position(|&q| q == p).expect("particle in list");
        self.order.remove(idx);
        self.order.insert(0, p);
    }

    /// Rank per particle, 1-based.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0usize; self.order.len()];
        for (rank0, &p) in self.order.iter().enumerate() {
            pos[p as usize] = rank0 + 1;
        }
        pos
    }
}
