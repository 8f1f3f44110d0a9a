//! Trajectories `Z_k = X_1 ⋯ X_k` and the length cocycle `Q_k = |Z_k|_S`.

use rand::RngCore;
use serde::Serialize;

use crate::base::{BaseGroup, NodeId, PositionTracker};
use crate::error::{Error, Result};
use crate::lamp::LampGroup;
use crate::stats::tracking::{tracking_stats, ProgressSpec, TrackingStats};
use crate::wreath::{Element, Wreath};

use super::measure::{sample_rng, StepDistribution};

/// Current position of a walk, with lamps stored per interned base vertex.
pub struct Walker<'w, L: LampGroup, B: BaseGroup> {
    wreath: &'w Wreath<L, B>,
    tracker: B::Tracker,
    lamps: Vec<L::Value>,
    position: NodeId,
    steps: u64,
    scratch: Vec<usize>,
    support: Vec<NodeId>,
}

impl<'w, L: LampGroup, B: BaseGroup> Walker<'w, L, B> {
    pub fn new(wreath: &'w Wreath<L, B>) -> Self {
        let tracker = wreath.base().tracker();
        Walker {
            wreath,
            tracker,
            lamps: vec![wreath.lamp().identity()],
            position: 0,
            steps: 0,
            scratch: Vec::new(),
            support: Vec::new(),
        }
    }

    /// Right-multiplies the current element by `g`.
    pub fn apply(&mut self, g: &Element<L, B>) {
        let lamp = self.wreath.lamp();
        for (x, v) in g.lamps.iter() {
            let node = self.tracker.translate(self.position, x) as usize;
            self.grow();
            self.lamps[node] = lamp.multiply(&self.lamps[node], v);
        }
        self.position = self.tracker.translate(self.position, &g.position);
        self.grow();
    }

    fn grow(&mut self) {
        let n = self.tracker.node_count();
        if self.lamps.len() < n {
            self.lamps.resize(n, self.wreath.lamp().identity());
        }
    }

    /// Draws `X ~ μ` and applies it.
    pub fn step<R: RngCore + ?Sized>(&mut self, mu: &StepDistribution<L, B>, rng: &mut R) {
        let mut idx = std::mem::take(&mut self.scratch);
        idx.clear();
        mu.draw_into(rng, &mut idx);
        for &i in &idx {
            self.apply(mu.piece(i));
        }
        self.scratch = idx;
        self.steps += 1;
    }

    /// Like [`Walker::step`], also returning the increment.
    pub fn step_recorded<R: RngCore + ?Sized>(
        &mut self,
        mu: &StepDistribution<L, B>,
        rng: &mut R,
    ) -> Element<L, B> {
        let mut idx = Vec::new();
        mu.draw_into(rng, &mut idx);
        let mut x = self.wreath.identity();
        for &i in &idx {
            self.apply(mu.piece(i));
            x = self.wreath.multiply(&x, mu.piece(i));
        }
        self.steps += 1;
        x
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn position(&self) -> NodeId {
        self.position
    }

    /// `d_H(id, Z̄_k)`.
    pub fn base_depth(&self) -> u64 {
        self.tracker.depth(self.position)
    }

    pub fn tracker(&self) -> &B::Tracker {
        &self.tracker
    }

    pub fn tracker_mut(&mut self) -> &mut B::Tracker {
        &mut self.tracker
    }

    /// The current element `Z_k` materialised.
    pub fn element(&self) -> Element<L, B> {
        let lamp = self.wreath.lamp();
        let lamps = self
            .lamps
            .iter()
            .enumerate()
            .filter(|(_, v)| !lamp.is_identity(v))
            .map(|(i, v)| (self.tracker.element(i as NodeId), v.clone()));
        self.wreath.element(lamps, self.tracker.element(self.position))
    }

    pub fn lamp_cost(&self) -> u64 {
        let lamp = self.wreath.lamp();
        self.lamps.iter().map(|v| lamp.cost(v)).sum()
    }

    /// `Q_k`, through the spanning-subtree formula when the base is a tree.
    pub fn word_length(&mut self) -> Result<u64> {
        let lamp = self.wreath.lamp();
        self.support.clear();
        let mut cost = 0;
        for (i, v) in self.lamps.iter().enumerate() {
            if !lamp.is_identity(v) {
                self.support.push(i as NodeId);
                cost += lamp.cost(v);
            }
        }
        match self.tracker.spanning_tree_edges(self.position, &self.support) {
            Some(edges) => Ok(2 * edges - self.tracker.depth(self.position) + cost),
            None => self.wreath.word_length(&self.element()),
        }
    }
}

/// `Q_k` and `d_H(id, Z̄_k)` at one checkpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Checkpoint {
    pub k: u64,
    pub q: u64,
    pub base_depth: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory<L: LampGroup, B: BaseGroup> {
    pub seed: u64,
    pub stream: u64,
    pub increments: Vec<Element<L, B>>,
    pub checkpoints: Vec<Checkpoint>,
}

/// `0`, the powers of two below `horizon`, and `horizon`.
pub fn default_checkpoints(horizon: u64) -> Vec<u64> {
    let mut out = vec![0];
    let mut k = 1;
    while k < horizon {
        out.push(k);
        k *= 2;
    }
    if horizon > 0 {
        out.push(horizon);
    }
    out
}

fn sorted_checkpoints(horizon: u64, checkpoints: &[u64]) -> Result<Vec<u64>> {
    if let Some(&bad) = checkpoints.iter().find(|&&k| k > horizon) {
        return Err(Error::Checkpoint { index: bad, horizon });
    }
    let mut ks = checkpoints.to_vec();
    ks.sort_unstable();
    ks.dedup();
    Ok(ks)
}

/// Runs `horizon` steps of sample `stream`, recording increments and the checkpoints.
pub fn run_trajectory<L: LampGroup, B: BaseGroup>(
    wreath: &Wreath<L, B>,
    mu: &StepDistribution<L, B>,
    horizon: u64,
    seed: u64,
    stream: u64,
    checkpoints: &[u64],
) -> Result<Trajectory<L, B>> {
    let ks = sorted_checkpoints(horizon, checkpoints)?;
    let mut rng = sample_rng(seed, stream);
    let mut walker = Walker::new(wreath);
    let mut increments = Vec::with_capacity(horizon as usize);
    let mut out = Vec::with_capacity(ks.len());
    let mut next = ks.iter().peekable();
    for k in 0..=horizon {
        if k > 0 {
            increments.push(walker.step_recorded(mu, &mut rng));
        }
        if next.peek() == Some(&&k) {
            next.next();
            out.push(Checkpoint {
                k,
                q: walker.word_length()?,
                base_depth: walker.base_depth(),
            });
        }
    }
    Ok(Trajectory {
        seed,
        stream,
        increments,
        checkpoints: out,
    })
}

/// Checkpoints only; the batch path.
pub(crate) fn cocycle_checkpoints<L: LampGroup, B: BaseGroup>(
    wreath: &Wreath<L, B>,
    mu: &StepDistribution<L, B>,
    seed: u64,
    stream: u64,
    checkpoints: &[u64],
) -> Result<Vec<Checkpoint>> {
    let horizon = checkpoints.iter().copied().max().unwrap_or(0);
    let ks = sorted_checkpoints(horizon, checkpoints)?;
    let mut rng = sample_rng(seed, stream);
    let mut walker = Walker::new(wreath);
    let mut out = Vec::with_capacity(ks.len());
    for &k in &ks {
        while walker.steps() < k {
            walker.step(mu, &mut rng);
        }
        out.push(Checkpoint {
            k,
            q: walker.word_length()?,
            base_depth: walker.base_depth(),
        });
    }
    Ok(out)
}

/// `Ψ_{m,n} = Q_m + d(Z_m, Z_{m+n}) - Q_{m+n}` on one trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DefectSample {
    pub m: u64,
    pub n: u64,
    pub q_m: u64,
    /// `d(Z_m, Z_{m+n}) = Q_n ∘ θ^m`
    pub shifted: u64,
    pub q_mn: u64,
    pub psi: i64,
}

/// The suffix `X_{m+1} ⋯ X_{m+n}` is replayed from a copy of the generator
/// state at time `m` on a fresh walker, which gives `Q_n ∘ θ^m` directly.
pub fn sample_defect<L: LampGroup, B: BaseGroup>(
    wreath: &Wreath<L, B>,
    mu: &StepDistribution<L, B>,
    m: u64,
    n: u64,
    seed: u64,
    stream: u64,
) -> Result<DefectSample> {
    let mut rng = sample_rng(seed, stream);
    let mut walker = Walker::new(wreath);
    for _ in 0..m {
        walker.step(mu, &mut rng);
    }
    let q_m = walker.word_length()?;
    let mut suffix_rng = rng.clone();
    for _ in 0..n {
        walker.step(mu, &mut rng);
    }
    let q_mn = walker.word_length()?;
    drop(walker);
    let mut suffix = Walker::new(wreath);
    for _ in 0..n {
        suffix.step(mu, &mut suffix_rng);
    }
    let shifted = suffix.word_length()?;
    Ok(DefectSample {
        m,
        n,
        q_m,
        shifted,
        q_mn,
        psi: q_m as i64 + shifted as i64 - q_mn as i64,
    })
}

/// Tracking statistics of one trajectory at each horizon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrackingSample {
    pub n: u64,
    pub stats: TrackingStats,
}

/// Keeps every base position up to the largest horizon and evaluates
/// [`tracking_stats`] on each prefix.
pub fn sample_tracking<L: LampGroup, B: BaseGroup>(
    wreath: &Wreath<L, B>,
    mu: &StepDistribution<L, B>,
    horizons: &[u64],
    progress: Option<ProgressSpec>,
    seed: u64,
    stream: u64,
) -> Result<Vec<TrackingSample>> {
    let horizon = horizons.iter().copied().max().unwrap_or(0);
    let hs = sorted_checkpoints(horizon, horizons)?;
    let mut rng = sample_rng(seed, stream);
    let mut walker = Walker::new(wreath);
    let mut positions = Vec::with_capacity(horizon as usize + 1);
    positions.push(walker.position());
    for _ in 0..horizon {
        walker.step(mu, &mut rng);
        positions.push(walker.position());
    }
    let tracker = walker.tracker_mut();
    Ok(hs
        .iter()
        .map(|&n| TrackingSample {
            n,
            stats: tracking_stats::<B>(tracker, &positions[..=n as usize], progress),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{FreeGroup, Lattice};
    use crate::lamp::{FiniteLampGroup, IntegerLamps};

    fn z2f2() -> Wreath<FiniteLampGroup, FreeGroup> {
        Wreath::new(FiniteLampGroup::cyclic(2).unwrap(), FreeGroup::new(2).unwrap())
    }

    #[test]
    fn walker_matches_generic_product() {
        let g = z2f2();
        let mu = StepDistribution::uniform_generators(&g).unwrap();
        let traj = run_trajectory(&g, &mu, 300, 3, 1, &default_checkpoints(300)).unwrap();
        let mut z = g.identity();
        let mut k = 0;
        for cp in &traj.checkpoints {
            while k < cp.k {
                z = g.multiply(&z, &traj.increments[k as usize]);
                k += 1;
            }
            assert_eq!(cp.q, g.word_length(&z).unwrap());
            assert_eq!(cp.base_depth, g.base().length(&z.position));
        }
        assert_eq!(traj.checkpoints[0], Checkpoint { k: 0, q: 0, base_depth: 0 });
    }

    #[test]
    fn walker_element_roundtrip() {
        let g = Wreath::new(IntegerLamps::new(1).unwrap(), FreeGroup::new(2).unwrap());
        let mu = StepDistribution::uniform_generators(&g).unwrap();
        let mut rng = sample_rng(9, 0);
        let mut walker = Walker::new(&g);
        let mut z = g.identity();
        for _ in 0..200 {
            let x = walker.step_recorded(&mu, &mut rng);
            z = g.multiply(&z, &x);
        }
        assert_eq!(walker.element(), z);
        assert_eq!(walker.word_length().unwrap(), g.word_length(&z).unwrap());
    }

    #[test]
    fn lattice_walker_uses_generic_length() {
        let g = Wreath::new(FiniteLampGroup::cyclic(2).unwrap(), Lattice::new(2).unwrap());
        let mu = StepDistribution::uniform_generators(&g).unwrap();
        let traj = run_trajectory(&g, &mu, 12, 1, 0, &[12]).unwrap();
        let z = traj
            .increments
            .iter()
            .fold(g.identity(), |z, x| g.multiply(&z, x));
        assert_eq!(traj.checkpoints[0].q, g.word_length(&z).unwrap());
    }

    #[test]
    fn trajectories_are_deterministic() {
        let g = z2f2();
        let mu = StepDistribution::uniform_generators(&g).unwrap();
        let a = run_trajectory(&g, &mu, 100, 5, 2, &[0, 50, 100]).unwrap();
        let b = run_trajectory(&g, &mu, 100, 5, 2, &[0, 50, 100]).unwrap();
        assert_eq!(a, b);
        let cps = cocycle_checkpoints(&g, &mu, 5, 2, &[0, 50, 100]).unwrap();
        assert_eq!(cps, a.checkpoints);
        assert!(matches!(
            run_trajectory(&g, &mu, 10, 5, 2, &[11]),
            Err(Error::Checkpoint { index: 11, horizon: 10 })
        ));
    }

    #[test]
    fn cocycle_is_subadditive_in_steps() {
        let g = z2f2();
        let mu = StepDistribution::uniform_generators(&g).unwrap();
        let traj = run_trajectory(&g, &mu, 256, 8, 0, &default_checkpoints(256)).unwrap();
        for cp in &traj.checkpoints {
            assert!(cp.q <= cp.k);
        }
    }

    #[test]
    fn defect_matches_shift_identity() {
        let g = z2f2();
        let mu = StepDistribution::uniform_generators(&g).unwrap();
        for stream in 0..20 {
            let (m, n) = (37, 53);
            let s = sample_defect(&g, &mu, m, n, 77, stream).unwrap();
            let traj = run_trajectory(&g, &mu, m + n, 77, stream, &[m, m + n]).unwrap();
            let prefix = traj.increments[..m as usize]
                .iter()
                .fold(g.identity(), |z, x| g.multiply(&z, x));
            let suffix = traj.increments[m as usize..]
                .iter()
                .fold(g.identity(), |z, x| g.multiply(&z, x));
            let full = traj
                .increments
                .iter()
                .fold(g.identity(), |z, x| g.multiply(&z, x));
            assert_eq!(g.multiply(&prefix, &suffix), full);
            assert_eq!(s.q_m, traj.checkpoints[0].q);
            assert_eq!(s.q_mn, traj.checkpoints[1].q);
            assert_eq!(s.shifted, g.word_length(&suffix).unwrap());
            assert_eq!(s.shifted, g.distance(&prefix, &full).unwrap());
            assert!(s.psi >= 0);
            assert!(s.psi as u64 <= 2 * s.q_m.min(s.shifted));
        }
    }

    #[test]
    fn defect_edge_cases() {
        let g = z2f2();
        let mu = StepDistribution::uniform_generators(&g).unwrap();
        assert_eq!(sample_defect(&g, &mu, 40, 0, 1, 0).unwrap().psi, 0);
        assert_eq!(sample_defect(&g, &mu, 0, 40, 1, 0).unwrap().psi, 0);
    }

    #[test]
    fn translation_walk_tracks_its_geodesic() {
        let g = z2f2();
        let a = g.translation(g.base().parse("a").unwrap());
        let mu = StepDistribution::new(&g, vec![(a, 1.0)], None, false).unwrap();
        let samples = sample_tracking(&g, &mu, &[16, 64], None, 0, 0).unwrap();
        for s in samples {
            assert_eq!(s.stats.max_deviation, 0);
            assert_eq!(s.stats.endpoint_depth, s.n);
        }
    }
}
