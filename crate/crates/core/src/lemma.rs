//! Deterministic defect bound for the fixed-endpoint TSP along a geodesic.
//!
//! Setting: points `A, B, C`, a geodesic `γ` from `A` to `C`, `R = d(A, B)` and
//! an integer `D > 0` with `d(B, γ) <= D`, `R >= 4D`, `d(A, C) >= R + 4D`. Two
//! point sets `L1, L2` lie within `D` of `γ`, points of `L1` satisfy
//! `d(A, x) <= R + 4D` and points of `L2` satisfy `d(A, y) >= R - 4D`. With `N`
//! the number of points of `L1 ∪ L2` in the window `R - 4D <= d(A, x) <= R + 4D`,
//! every `L3` with `L1 △ L2 ⊆ L3 ⊆ L1 ∪ L2` satisfies
//!
//! ```text
//! 0 <= TSP(A, L1, B) + TSP(B, L2, C) - TSP(A, L3, C) <= 24 (N + 1) D.
//! ```
//!
//! Besides checking the inequality with exact solvers, [`surgery`] rebuilds an
//! optimal path for `TSP(A, L1 △ L2, C)` into a path `β` that visits `L1`,
//! passes through `B`, then visits `L2`, so the upper bound can be inspected
//! path by path rather than only through solver values.

use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;

use crate::base::{BaseGroup, FreeGroup, GeodesicSegment, Letter, Word};
use crate::error::{Error, Result};
use crate::tsp::{self, SolverPolicy, TspInstance};

/// Input of the lemma. Derived quantities come from [`certify_hypotheses`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaInstance<E> {
    pub a: E,
    pub b: E,
    pub c: E,
    pub gamma: GeodesicSegment<E>,
    pub l1: Vec<E>,
    pub l2: Vec<E>,
    pub d: u64,
}

impl<E: Clone + Ord> LemmaInstance<E> {
    pub fn new(
        a: E,
        b: E,
        c: E,
        gamma: GeodesicSegment<E>,
        l1: impl IntoIterator<Item = E>,
        l2: impl IntoIterator<Item = E>,
        d: u64,
    ) -> Self {
        let sorted = |it: Vec<E>| -> Vec<E> {
            let mut v = it;
            v.sort();
            v.dedup();
            v
        };
        LemmaInstance {
            a,
            b,
            c,
            gamma,
            l1: sorted(l1.into_iter().collect()),
            l2: sorted(l2.into_iter().collect()),
            d,
        }
    }

    pub fn symmetric_difference(&self) -> Vec<E> {
        let s1: BTreeSet<&E> = self.l1.iter().collect();
        let s2: BTreeSet<&E> = self.l2.iter().collect();
        s1.symmetric_difference(&s2).map(|&x| x.clone()).collect()
    }

    pub fn union(&self) -> Vec<E> {
        let s: BTreeSet<&E> = self.l1.iter().chain(&self.l2).collect();
        s.into_iter().cloned().collect()
    }

    pub fn intersection(&self) -> Vec<E> {
        let s2: BTreeSet<&E> = self.l2.iter().collect();
        self.l1.iter().filter(|x| s2.contains(x)).cloned().collect()
    }
}

/// Pass/fail for each hypothesis and the derived `R, N, B1, B2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certification<E> {
    pub r: u64,
    pub n: usize,
    pub b1: Option<E>,
    pub b2: Option<E>,
    pub d_positive: bool,
    pub distinct_points: bool,
    pub gamma_connects: bool,
    pub b_near_gamma: bool,
    pub r_at_least_4d: bool,
    pub c_far_enough: bool,
    pub points_near_gamma: bool,
    pub l1_window: bool,
    pub l2_window: bool,
}

impl<E> Certification<E> {
    pub fn certified(&self) -> bool {
        self.failures().is_empty()
    }

    /// Names of the failing hypotheses.
    pub fn failures(&self) -> Vec<&'static str> {
        [
            (self.d_positive, "D > 0"),
            (self.distinct_points, "A, B, C distinct"),
            (self.gamma_connects, "gamma is a geodesic from A to C"),
            (self.b_near_gamma, "d(B, gamma) <= D"),
            (self.r_at_least_4d, "R >= 4D"),
            (self.c_far_enough, "d(A, C) >= R + 4D"),
            (self.points_near_gamma, "L1 and L2 within D of gamma"),
            (self.l1_window, "d(A, x) <= R + 4D on L1"),
            (self.l2_window, "d(A, y) >= R - 4D on L2"),
        ]
        .into_iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, name)| name)
        .collect()
    }
}

pub fn certify_hypotheses<B: BaseGroup>(
    group: &B,
    inst: &LemmaInstance<B::Elem>,
) -> Certification<B::Elem> {
    let d = inst.d;
    let r = group.distance(&inst.a, &inst.b);
    let ac = group.distance(&inst.a, &inst.c);
    let gamma = &inst.gamma;
    let gamma_connects = !gamma.is_empty()
        && gamma.first() == &inst.a
        && gamma.last() == &inst.c
        && gamma.len() == ac
        && gamma
            .vertices()
            .windows(2)
            .all(|w| group.distance(&w[0], &w[1]) == 1);
    let near = |x: &B::Elem| {
        gamma_connects
            && group
                .distance_to_geodesic(x, gamma)
                .map(|dist| dist <= d)
                .unwrap_or(false)
    };
    let lo = r.saturating_sub(4 * d);
    let hi = r + 4 * d;
    let n = inst
        .union()
        .iter()
        .filter(|x| {
            let t = group.distance(&inst.a, x);
            r >= 4 * d && lo <= t && t <= hi
        })
        .count();
    let b1 = r
        .checked_sub(4 * d)
        .and_then(|o| gamma.at(o))
        .filter(|_| gamma_connects)
        .cloned();
    let b2 = gamma.at(hi).filter(|_| gamma_connects).cloned();
    Certification {
        r,
        n,
        b1,
        b2,
        d_positive: d > 0,
        distinct_points: inst.a != inst.b && inst.b != inst.c && inst.a != inst.c,
        gamma_connects,
        b_near_gamma: near(&inst.b),
        r_at_least_4d: r >= 4 * d,
        c_far_enough: ac >= hi,
        points_near_gamma: inst.l1.iter().chain(&inst.l2).all(near),
        l1_window: inst.l1.iter().all(|x| group.distance(&inst.a, x) <= hi),
        l2_window: inst
            .l2
            .iter()
            .all(|y| group.distance(&inst.a, y) + 4 * d >= r),
    }
}

/// Part of the `D`-neighbourhood of `γ`, by distance from `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Region {
    /// `d(A, x) <= R - 4D`
    Initial,
    /// `R - 4D < d(A, x) < R + 4D`
    Middle,
    /// `d(A, x) >= R + 4D`
    Terminal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regions<E> {
    pub initial: Vec<E>,
    pub middle: Vec<E>,
    pub terminal: Vec<E>,
}

/// Certified geometry shared by the operations below.
struct Frame<'a, B: BaseGroup> {
    group: &'a B,
    inst: &'a LemmaInstance<B::Elem>,
    r: u64,
    n: usize,
    b1: B::Elem,
    b2: B::Elem,
}

impl<'a, B: BaseGroup> Frame<'a, B> {
    fn new(group: &'a B, inst: &'a LemmaInstance<B::Elem>) -> Result<Self> {
        let cert = certify_hypotheses(group, inst);
        if !cert.certified() {
            return Err(Error::NotCertified(cert.failures().join("; ")));
        }
        Ok(Frame {
            group,
            inst,
            r: cert.r,
            n: cert.n,
            b1: cert.b1.expect("certified"),
            b2: cert.b2.expect("certified"),
        })
    }

    fn region(&self, x: &B::Elem) -> Result<Region> {
        let near = self.group.distance_to_geodesic(x, &self.inst.gamma)?;
        if near > self.inst.d {
            return Err(Error::OutsideNeighborhood(self.group.format(x)));
        }
        Ok(self.region_unchecked(x))
    }

    fn region_unchecked(&self, x: &B::Elem) -> Region {
        let t = self.group.distance(&self.inst.a, x);
        let d4 = 4 * self.inst.d;
        if t + d4 <= self.r {
            Region::Initial
        } else if t >= self.r + d4 {
            Region::Terminal
        } else {
            Region::Middle
        }
    }

    fn bound(&self) -> u64 {
        24 * (self.n as u64 + 1) * self.inst.d
    }
}

/// Splits `points` into the initial, middle and terminal parts of `N_D(γ)`.
pub fn classify_regions<B: BaseGroup>(
    group: &B,
    inst: &LemmaInstance<B::Elem>,
    points: &[B::Elem],
) -> Result<Regions<B::Elem>> {
    let frame = Frame::new(group, inst)?;
    let mut out = Regions {
        initial: Vec::new(),
        middle: Vec::new(),
        terminal: Vec::new(),
    };
    for x in points {
        match frame.region(x)? {
            Region::Initial => out.initial.push(x.clone()),
            Region::Middle => out.middle.push(x.clone()),
            Region::Terminal => out.terminal.push(x.clone()),
        }
    }
    Ok(out)
}

/// Region of a single point.
pub fn region_of<B: BaseGroup>(
    group: &B,
    inst: &LemmaInstance<B::Elem>,
    x: &B::Elem,
) -> Result<Region> {
    Frame::new(group, inst)?.region(x)
}

/// Solver values and verdict for one admissible `L3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SandwichReport {
    pub r: u64,
    pub n: usize,
    pub t1: u64,
    pub t2: u64,
    pub t3: u64,
    pub defect: i64,
    pub bound: u64,
    pub verdict: bool,
}

pub fn defect_sandwich<B: BaseGroup>(
    group: &B,
    inst: &LemmaInstance<B::Elem>,
    l3: &[B::Elem],
) -> Result<SandwichReport> {
    let frame = Frame::new(group, inst)?;
    let l3_set: BTreeSet<&B::Elem> = l3.iter().collect();
    let union: BTreeSet<B::Elem> = inst.union().into_iter().collect();
    let sym = inst.symmetric_difference();
    if !sym.iter().all(|x| l3_set.contains(x)) || !l3_set.iter().all(|x| union.contains(*x)) {
        return Err(Error::SandwichPrecondition);
    }
    let policy = SolverPolicy::default();
    let solve = |start: &B::Elem, pts: &[B::Elem], end: &B::Elem| -> Result<u64> {
        let i = TspInstance::new(start.clone(), pts.iter().cloned(), end.clone());
        Ok(tsp::solve(group, &i, policy)?.value)
    };
    let t1 = solve(&inst.a, &inst.l1, &inst.b)?;
    let t2 = solve(&inst.b, &inst.l2, &inst.c)?;
    let t3 = solve(&inst.a, l3, &inst.c)?;
    let defect = t1 as i64 + t2 as i64 - t3 as i64;
    let bound = frame.bound();
    Ok(SandwichReport {
        r: frame.r,
        n: frame.n,
        t1,
        t2,
        t3,
        defect,
        bound,
        verdict: defect >= 0 && defect as u64 <= bound,
    })
}

/// A piecewise geodesic given by its nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodePath<E> {
    nodes: Vec<E>,
    length: u64,
}

impl<E: Clone> NodePath<E> {
    pub fn new<B: BaseGroup<Elem = E>>(group: &B, nodes: Vec<E>) -> Self {
        let length = nodes.windows(2).map(|w| group.distance(&w[0], &w[1])).sum();
        NodePath { nodes, length }
    }

    /// `[start] ++ order ++ [end]`.
    pub fn from_order<B: BaseGroup<Elem = E>>(group: &B, start: &E, order: &[E], end: &E) -> Self {
        let mut nodes = Vec::with_capacity(order.len() + 2);
        nodes.push(start.clone());
        nodes.extend_from_slice(order);
        nodes.push(end.clone());
        Self::new(group, nodes)
    }

    pub fn nodes(&self) -> &[E] {
        &self.nodes
    }

    pub fn length(&self) -> u64 {
        self.length
    }
}

/// The rebuilt path `β` and the index of its designated visit to `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryPath<E> {
    pub path: NodePath<E>,
    pub pivot: usize,
    /// `24 (N + 1) D`
    pub bound: u64,
}

impl<E: Clone + Eq> SurgeryPath<E> {
    /// Starts at `A`, meets all of `L1` before the pivot, the pivot is `B`,
    /// meets all of `L2` after it, ends at `C`.
    pub fn satisfies_visit_contract(&self, inst: &LemmaInstance<E>) -> bool {
        let nodes = self.path.nodes();
        let (before, after) = nodes.split_at(self.pivot);
        nodes.first() == Some(&inst.a)
            && nodes.last() == Some(&inst.c)
            && nodes.get(self.pivot) == Some(&inst.b)
            && inst.l1.iter().all(|x| before.contains(x))
            && inst.l2.iter().all(|y| after[1..].contains(y))
    }
}

/// Rebuilds `α` (a path for `TSP(A, L1 △ L2, C)`) into `β`.
///
/// Nodes of `α` are grouped into maximal runs inside the initial part
/// (`p_1, ..., p_t`) and the terminal part (`q_1, ..., q_r`); every other
/// segment is dropped. `β` follows `p_1`, returns to `B1` between consecutive
/// `p_i` and after `p_t`, crosses the middle part through the leftover points of
/// `L1`, then `B`, then the leftover points of `L2`, reaches `B2`, and follows
/// `q_1, ..., q_r` with a return to `B2` between consecutive runs.
pub fn surgery<B: BaseGroup>(
    group: &B,
    inst: &LemmaInstance<B::Elem>,
    alpha: &NodePath<B::Elem>,
) -> Result<SurgeryPath<B::Elem>> {
    let frame = Frame::new(group, inst)?;
    let nodes = alpha.nodes();
    if nodes.len() < 2 || nodes[0] != inst.a || nodes[nodes.len() - 1] != inst.c {
        return Err(Error::InvalidPath("alpha must run from A to C".into()));
    }
    let mut interior = nodes[1..nodes.len() - 1].to_vec();
    interior.sort();
    if interior != inst.symmetric_difference() {
        return Err(Error::InvalidPath(
            "alpha must visit each point of L1 \u{25b3} L2 exactly once".into(),
        ));
    }

    let regions = nodes
        .iter()
        .map(|x| frame.region(x))
        .collect::<Result<Vec<_>>>()?;
    let runs = |want: Region| -> Vec<&[B::Elem]> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < nodes.len() {
            if regions[i] == want {
                let start = i;
                while i < nodes.len() && regions[i] == want {
                    i += 1;
                }
                out.push(&nodes[start..i]);
            } else {
                i += 1;
            }
        }
        out
    };
    let initial_runs = runs(Region::Initial);
    let terminal_runs = runs(Region::Terminal);

    let mut beta: Vec<B::Elem> = Vec::new();
    for (i, p) in initial_runs.iter().enumerate() {
        if i > 0 {
            beta.push(frame.b1.clone());
        }
        beta.extend_from_slice(p);
    }
    beta.push(frame.b1.clone());

    let in_runs = |runs: &[&[B::Elem]]| -> BTreeSet<B::Elem> {
        runs.iter().flat_map(|r| r.iter().cloned()).collect()
    };
    let covered_initial = in_runs(&initial_runs);
    let covered_terminal = in_runs(&terminal_runs);
    let by_offset = |mut v: Vec<B::Elem>| -> Vec<B::Elem> {
        v.sort_by_cached_key(|x| (group.distance(&inst.a, x), x.clone()));
        v
    };
    let rest1 = by_offset(
        inst.l1
            .iter()
            .filter(|x| !covered_initial.contains(*x))
            .cloned()
            .collect(),
    );
    let rest2 = by_offset(
        inst.l2
            .iter()
            .filter(|y| !covered_terminal.contains(*y))
            .cloned()
            .collect(),
    );
    beta.extend(rest1);
    let pivot = beta.len();
    beta.push(inst.b.clone());
    beta.extend(rest2);
    beta.push(frame.b2.clone());

    for (j, q) in terminal_runs.iter().enumerate() {
        if j > 0 {
            beta.push(frame.b2.clone());
        }
        beta.extend_from_slice(q);
    }

    Ok(SurgeryPath {
        path: NodePath::new(group, beta),
        pivot,
        bound: frame.bound(),
    })
}

/// Which projection inequality a pair of points exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClaimKind {
    /// `P ∈ I, Q ∈ T`: `|P B1| + |B2 Q| <= |P Q|`
    Leap,
    /// `P ∈ I, Q ∈ M`: `|P B1| <= |P Q| + 6D`
    StepInitial,
    /// `P ∈ T, Q ∈ M`: `|P B2| <= |P Q| + 6D`
    StepTerminal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimCheck {
    pub kind: ClaimKind,
    pub lhs: u64,
    pub rhs: u64,
}

impl ClaimCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// Evaluates the applicable claim for `(p, q)` in either order; `None` when
/// the pair does not straddle two distinct regions with an initial or terminal end.
pub fn check_claims<B: BaseGroup>(
    group: &B,
    inst: &LemmaInstance<B::Elem>,
    p: &B::Elem,
    q: &B::Elem,
) -> Result<Option<ClaimCheck>> {
    let frame = Frame::new(group, inst)?;
    let (rp, rq) = (frame.region(p)?, frame.region(q)?);
    let (p, q, rp, rq) = if rp <= rq { (p, q, rp, rq) } else { (q, p, rq, rp) };
    let dist = |x: &B::Elem, y: &B::Elem| group.distance(x, y);
    let six_d = 6 * inst.d;
    Ok(match (rp, rq) {
        (Region::Initial, Region::Terminal) => Some(ClaimCheck {
            kind: ClaimKind::Leap,
            lhs: dist(p, &frame.b1) + dist(&frame.b2, q),
            rhs: dist(p, q),
        }),
        (Region::Initial, Region::Middle) => Some(ClaimCheck {
            kind: ClaimKind::StepInitial,
            lhs: dist(p, &frame.b1),
            rhs: dist(p, q) + six_d,
        }),
        (Region::Middle, Region::Terminal) => Some(ClaimCheck {
            kind: ClaimKind::StepTerminal,
            lhs: dist(q, &frame.b2),
            rhs: dist(p, q) + six_d,
        }),
        _ => None,
    })
}

/// Parameters of the random certified instance generator on a free group.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct InstanceParams {
    pub d_min: u64,
    pub d_max: u64,
    pub axis_min: u64,
    pub axis_max: u64,
    pub max_points: usize,
    /// Expected lamp points per unit of axis length, before the cap.
    pub density: f64,
}

impl Default for InstanceParams {
    fn default() -> Self {
        InstanceParams {
            d_min: 1,
            d_max: 3,
            axis_min: 8,
            axis_max: 200,
            max_points: 12,
            density: 0.1,
        }
    }
}

impl InstanceParams {
    pub fn validate(&self) -> Result<()> {
        if self.d_min == 0 {
            return Err(Error::config("d_min", "must be positive"));
        }
        if self.d_min > self.d_max {
            return Err(Error::config("d_max", "must be at least d_min"));
        }
        if self.axis_min > self.axis_max {
            return Err(Error::config("axis_min", "must not exceed axis_max"));
        }
        if self.axis_max < 8 * self.d_max {
            return Err(Error::config("axis_max", "must be at least 8 * d_max"));
        }
        if !(self.density.is_finite() && self.density >= 0.0) {
            return Err(Error::config("density", "must be a non-negative number"));
        }
        Ok(())
    }
}

fn random_reduced_word<R: Rng + ?Sized>(
    rank: usize,
    len: usize,
    forbidden_first: &[Letter],
    rng: &mut R,
) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(len);
    while out.len() < len {
        let i = rng.random_range(1..=rank as Letter);
        let l = if rng.random_bool(0.5) { i } else { -i };
        let bad = match out.last() {
            None => forbidden_first.contains(&l),
            Some(&prev) => prev == -l,
        };
        if !bad {
            out.push(l);
        }
    }
    out
}

/// Point at offset `s` along the axis word, branching off by `e <= D` letters.
fn branch_point<R: Rng + ?Sized>(
    group: &FreeGroup,
    a: &Word,
    axis: &[Letter],
    s: usize,
    e: usize,
    rng: &mut R,
) -> Word {
    let mut forbidden = Vec::new();
    if s < axis.len() {
        forbidden.push(axis[s]);
    }
    if s > 0 {
        forbidden.push(-axis[s - 1]);
    }
    let mut letters: Vec<i64> = axis[..s].iter().map(|&l| l as i64).collect();
    letters.extend(
        random_reduced_word(group.rank(), e, &forbidden, rng)
            .into_iter()
            .map(i64::from),
    );
    let rel = group.reduce_word(&letters).expect("letters within rank");
    group.multiply(a, &rel)
}

/// Draws a certified instance on a free group.
pub fn random_instance<R: Rng + ?Sized>(
    group: &FreeGroup,
    params: &InstanceParams,
    rng: &mut R,
) -> LemmaInstance<Word> {
    let d = rng.random_range(params.d_min..=params.d_max);
    let axis_len = rng.random_range(params.axis_min.max(8 * d)..=params.axis_max) as usize;
    let a_len = rng.random_range(0..=4);
    let a = group
        .reduce_word(
            &random_reduced_word(group.rank(), a_len, &[], rng)
                .into_iter()
                .map(i64::from)
                .collect::<Vec<_>>(),
        )
        .expect("letters within rank");
    let axis = random_reduced_word(group.rank(), axis_len, &[], rng);
    let axis_word = group
        .reduce_word(&axis.iter().map(|&l| l as i64).collect::<Vec<_>>())
        .expect("letters within rank");
    let c = group.multiply(&a, &axis_word);
    let gamma = group.geodesic(&a, &c);

    let du = d as usize;
    let e_b = rng.random_range(0..=du);
    let s_b = rng.random_range((4 * du).saturating_sub(e_b)..=axis_len - 4 * du - e_b);
    let b = branch_point(group, &a, &axis, s_b, e_b, rng);
    let r = s_b + e_b;

    let cap = ((params.density * axis_len as f64).ceil() as usize).min(params.max_points);
    let k = rng.random_range(0..=cap);
    let (mut l1, mut l2) = (Vec::new(), Vec::new());
    for _ in 0..k {
        let s = if rng.random_bool(0.5) {
            rng.random_range(r.saturating_sub(5 * du)..=(r + 4 * du).min(axis_len))
        } else {
            rng.random_range(0..=axis_len)
        };
        let e = rng.random_range(0..=du);
        let x = branch_point(group, &a, &axis, s, e, rng);
        let t = s + e;
        if t + 4 * du < r {
            l1.push(x);
        } else if t > r + 4 * du {
            l2.push(x);
        } else {
            match rng.random_range(0..3) {
                0 => l1.push(x),
                1 => l2.push(x),
                _ => {
                    l1.push(x.clone());
                    l2.push(x);
                }
            }
        }
    }
    LemmaInstance::new(a, b, c, gamma, l1, l2, d)
}

/// A random admissible `L3`: `L1 △ L2` plus each shared point with probability 1/2.
pub fn random_l3<E: Clone + Ord, R: Rng + ?Sized>(inst: &LemmaInstance<E>, rng: &mut R) -> Vec<E> {
    let mut l3 = inst.symmetric_difference();
    l3.extend(inst.intersection().into_iter().filter(|_| rng.random_bool(0.5)));
    l3.sort();
    l3
}

/// A random point of `N_D(γ)` for claim sampling.
pub fn random_near_point<R: Rng + ?Sized>(
    group: &FreeGroup,
    inst: &LemmaInstance<Word>,
    rng: &mut R,
) -> Word {
    let axis = group.multiply(&group.inverse(&inst.a), &inst.c);
    let s = rng.random_range(0..=axis.len());
    let e = rng.random_range(0..=inst.d as usize);
    branch_point(group, &inst.a, axis.letters(), s, e, rng)
}

/// One row of the randomized lemma check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub seed: u64,
    pub r: u64,
    pub d: u64,
    pub n: usize,
    pub t1: u64,
    pub t2: u64,
    pub t3: u64,
    pub defect: i64,
    pub bound: u64,
    pub verdict: bool,
    /// `TSP(A, L1 △ L2, C)`
    pub alpha: u64,
    /// `|β|` from [`surgery`]
    pub beta: u64,
    /// Visit contract holds and `|β| <= |α| + 24 (N + 1) D`.
    pub beta_ok: bool,
}

/// Draws an instance and an admissible `L3` from `ChaCha8Rng::seed_from_u64(seed)`,
/// then runs the sandwich check and the surgery.
pub fn check_random_instance(
    group: &FreeGroup,
    params: &InstanceParams,
    seed: u64,
) -> Result<LemmaCheck> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let inst = random_instance(group, params, &mut rng);
    let l3 = random_l3(&inst, &mut rng);
    let rep = defect_sandwich(group, &inst, &l3)?;
    let sol = tsp::solve_tree(
        group,
        &TspInstance::new(inst.a.clone(), inst.symmetric_difference(), inst.c.clone()),
    )?;
    let alpha = NodePath::from_order(group, &inst.a, &sol.order, &inst.c);
    let beta = surgery(group, &inst, &alpha)?;
    let beta_len = beta.path.length();
    Ok(LemmaCheck {
        seed,
        r: rep.r,
        d: inst.d,
        n: rep.n,
        t1: rep.t1,
        t2: rep.t2,
        t3: rep.t3,
        defect: rep.defect,
        bound: rep.bound,
        verdict: rep.verdict,
        alpha: alpha.length(),
        beta: beta_len,
        beta_ok: beta.satisfies_visit_contract(&inst) && beta_len <= alpha.length() + beta.bound,
    })
}
