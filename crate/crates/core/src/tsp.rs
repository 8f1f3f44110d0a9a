//! Fixed-endpoint traveling salesman problem `TSP(A, L, B)` on a base group.
//!
//! `TSP(A, L, B)` is the least length of a path from `A` to `B` through every
//! point of `L`. A path is determined by the order in which it first meets the
//! points, so each solver searches over visit orders:
//!
//! * [`solve_dp`]: Held–Karp subset dynamic programming, exact, any base group.
//! * [`solve_tree`]: closed form `2 W(T) - d(A, B)` with `T` the minimal
//!   subtree spanning `{A, B} ∪ L`; valid when the Cayley graph is a tree.
//! * [`brute_force`]: enumeration of all orders, used as a test oracle.
//! * [`solve_heuristic`]: nearest neighbour plus 2-opt, never exact.

use serde::Serialize;

use crate::base::{BaseGroup, Letter};
use crate::error::{Error, Result};

/// Default support-size cap for the exact subset DP.
pub const DEFAULT_DP_CAP: usize = 20;

/// Largest point set accepted by [`brute_force`].
pub const BRUTE_FORCE_LIMIT: usize = 9;

/// `(start, L, end)` with `L` stored sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TspInstance<E> {
    start: E,
    points: Vec<E>,
    end: E,
}

impl<E: Clone + Ord> TspInstance<E> {
    pub fn new(start: E, points: impl IntoIterator<Item = E>, end: E) -> Self {
        let mut points: Vec<E> = points.into_iter().collect();
        points.sort();
        points.dedup();
        TspInstance { start, points, end }
    }

    pub fn start(&self) -> &E {
        &self.start
    }

    pub fn end(&self) -> &E {
        &self.end
    }

    pub fn points(&self) -> &[E] {
        &self.points
    }
}

/// Optimal value and a visit order attaining it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TspSolution<E> {
    pub value: u64,
    pub order: Vec<E>,
    /// False only for heuristic output.
    pub exact: bool,
}

/// How word lengths pick a solver when the base group is not a tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverPolicy {
    /// Subset DP up to `cap` points, error beyond.
    Exact { cap: usize },
    /// Subset DP up to `cap` points, heuristic beyond (reported as non-exact).
    Approximate { cap: usize },
}

impl Default for SolverPolicy {
    fn default() -> Self {
        SolverPolicy::Exact {
            cap: DEFAULT_DP_CAP,
        }
    }
}

/// Picks the solver for `group` under `policy`; tree groups always use [`solve_tree`].
pub fn solve<B: BaseGroup>(
    group: &B,
    inst: &TspInstance<B::Elem>,
    policy: SolverPolicy,
) -> Result<TspSolution<B::Elem>> {
    if group.is_tree() {
        return solve_tree(group, inst);
    }
    match policy {
        SolverPolicy::Exact { cap } => solve_dp(group, inst, cap),
        SolverPolicy::Approximate { cap } if inst.points.len() <= cap => solve_dp(group, inst, cap),
        SolverPolicy::Approximate { .. } => Ok(solve_heuristic(group, inst)),
    }
}

/// `d(A, l_1) + Σ d(l_i, l_{i+1}) + d(l_k, B)`.
pub fn path_length<B: BaseGroup>(group: &B, start: &B::Elem, order: &[B::Elem], end: &B::Elem) -> u64 {
    let mut total = 0;
    let mut prev = start;
    for p in order {
        total += group.distance(prev, p);
        prev = p;
    }
    total + group.distance(prev, end)
}

/// Distances among points, then start (index k) and end (index k + 1).
fn distance_matrix<B: BaseGroup>(group: &B, inst: &TspInstance<B::Elem>) -> Vec<Vec<u64>> {
    let nodes: Vec<&B::Elem> = inst
        .points
        .iter()
        .chain([&inst.start, &inst.end])
        .collect();
    let n = nodes.len();
    let mut d = vec![vec![0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = group.distance(nodes[i], nodes[j]);
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Held–Karp over visit orders.
///
/// `rest[S][i]` is the cheapest path that starts at point `i`, visits every
/// point of `S` (with `i ∉ S`) and ends at `B`. The order is rebuilt greedily
/// from the front, always taking the smallest feasible point index, which
/// yields the lexicographically smallest optimal order.
pub fn solve_dp<B: BaseGroup>(
    group: &B,
    inst: &TspInstance<B::Elem>,
    cap: usize,
) -> Result<TspSolution<B::Elem>> {
    let k = inst.points.len();
    if k > cap || k >= 31 {
        return Err(Error::CapExceeded { size: k, cap });
    }
    let d = distance_matrix(group, inst);
    let (a, b) = (k, k + 1);
    if k == 0 {
        return Ok(TspSolution {
            value: d[a][b],
            order: Vec::new(),
            exact: true,
        });
    }
    let max = d.iter().flatten().copied().max().unwrap_or(0);
    if max.saturating_mul(k as u64 + 1) >= u32::MAX as u64 {
        return Err(Error::InvalidGroup(
            "distances too large for the subset DP table".into(),
        ));
    }
    let d32: Vec<Vec<u32>> = d
        .iter()
        .map(|r| r.iter().map(|&v| v as u32).collect())
        .collect();

    let full = (1usize << k) - 1;
    let mut rest = vec![u32::MAX; (full + 1) * k];
    for i in 0..k {
        rest[i] = d32[i][b];
    }
    for mask in 1..=full {
        for i in 0..k {
            if mask & (1 << i) != 0 {
                continue;
            }
            let mut best = u32::MAX;
            let mut m = mask;
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                let cand = d32[i][j] + rest[(mask ^ (1 << j)) * k + j];
                best = best.min(cand);
            }
            rest[mask * k + i] = best;
        }
    }

    let value = (0..k)
        .map(|i| d32[a][i] + rest[(full ^ (1 << i)) * k + i])
        .min()
        .expect("k > 0");
    let mut order = Vec::with_capacity(k);
    let mut remaining = full;
    let mut cur = a;
    let mut target = value;
    while remaining != 0 {
        let j = (0..k)
            .filter(|&j| remaining & (1 << j) != 0)
            .find(|&j| d32[cur][j] + rest[(remaining ^ (1 << j)) * k + j] == target)
            .expect("DP table is consistent");
        remaining ^= 1 << j;
        target -= d32[cur][j];
        cur = j;
        order.push(inst.points[j].clone());
    }
    Ok(TspSolution {
        value: value as u64,
        order,
        exact: true,
    })
}

/// Exhaustive search over all visit orders, in lexicographic order so the
/// first optimum found is the lexicographically smallest.
pub fn brute_force<B: BaseGroup>(
    group: &B,
    inst: &TspInstance<B::Elem>,
) -> Result<TspSolution<B::Elem>> {
    let k = inst.points.len();
    if k > BRUTE_FORCE_LIMIT {
        return Err(Error::BruteForceGuard {
            size: k,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let d = distance_matrix(group, inst);

    struct Search<'a> {
        d: &'a [Vec<u64>],
        k: usize,
        used: Vec<bool>,
        current: Vec<usize>,
        best: u64,
        best_order: Vec<usize>,
    }

    impl Search<'_> {
        fn run(&mut self, last: usize, acc: u64) {
            if self.current.len() == self.k {
                let total = acc + self.d[last][self.k + 1];
                if total < self.best {
                    self.best = total;
                    self.best_order = self.current.clone();
                }
                return;
            }
            for j in 0..self.k {
                if !self.used[j] {
                    self.used[j] = true;
                    self.current.push(j);
                    self.run(j, acc + self.d[last][j]);
                    self.current.pop();
                    self.used[j] = false;
                }
            }
        }
    }

    let mut search = Search {
        d: &d,
        k,
        used: vec![false; k],
        current: Vec::with_capacity(k),
        best: u64::MAX,
        best_order: Vec::new(),
    };
    search.run(k, 0);
    Ok(TspSolution {
        value: search.best,
        order: search
            .best_order
            .iter()
            .map(|&j| inst.points[j].clone())
            .collect(),
        exact: true,
    })
}

/// Tree formula `2 W(T) - d(A, B)`.
///
/// Everything is translated by `A^{-1}`, so `T` becomes the union of root
/// paths of the normal forms of `A^{-1} x` for `x ∈ L ∪ {B}`, i.e. a trie.
/// A depth-first traversal of the trie that enters the branch toward `B`
/// last meets the points in an order attaining the value.
pub fn solve_tree<B: BaseGroup>(
    group: &B,
    inst: &TspInstance<B::Elem>,
) -> Result<TspSolution<B::Elem>> {
    if !group.is_tree() {
        return Err(Error::NotATree);
    }
    let shift = group.inverse(&inst.start);
    let relative = |x: &B::Elem| -> Vec<Letter> {
        group
            .tree_word(&group.multiply(&shift, x))
            .expect("tree groups provide normal forms")
    };

    let mut trie = Trie::default();
    let end_word = relative(&inst.end);
    let end_node = trie.insert(&end_word);
    for (i, p) in inst.points.iter().enumerate() {
        let node = trie.insert(&relative(p));
        trie.nodes[node].point = Some(i);
    }
    let mut v = end_node;
    loop {
        trie.nodes[v].toward_end = true;
        match trie.nodes[v].parent {
            Some(p) => v = p,
            None => break,
        }
    }

    let edges = (trie.nodes.len() - 1) as u64;
    let value = 2 * edges - end_word.len() as u64;
    let order = trie
        .visit_order()
        .into_iter()
        .map(|i| inst.points[i].clone())
        .collect();
    Ok(TspSolution {
        value,
        order,
        exact: true,
    })
}

#[derive(Default)]
struct TrieNode {
    parent: Option<usize>,
    children: Vec<(Letter, usize)>,
    point: Option<usize>,
    toward_end: bool,
}

struct Trie {
    nodes: Vec<TrieNode>,
}

impl Default for Trie {
    fn default() -> Self {
        Trie {
            nodes: vec![TrieNode::default()],
        }
    }
}

impl Trie {
    fn insert(&mut self, word: &[Letter]) -> usize {
        let mut v = 0;
        for &l in word {
            v = match self.nodes[v].children.iter().find(|(c, _)| *c == l) {
                Some(&(_, child)) => child,
                None => {
                    let id = self.nodes.len();
                    self.nodes.push(TrieNode {
                        parent: Some(v),
                        ..TrieNode::default()
                    });
                    self.nodes[v].children.push((l, id));
                    id
                }
            };
        }
        v
    }

    /// Point indices in first-visit order of a DFS that enters the branch
    /// toward the end last.
    fn visit_order(&mut self) -> Vec<usize> {
        for i in 0..self.nodes.len() {
            let mut kids = std::mem::take(&mut self.nodes[i].children);
            kids.sort_by_key(|&(l, c)| (self.nodes[c].toward_end, l));
            self.nodes[i].children = kids;
        }
        let mut order = Vec::new();
        order.extend(self.nodes[0].point);
        let mut stack = vec![(0usize, 0usize)];
        while let Some(top) = stack.last_mut() {
            let (node, idx) = *top;
            if let Some(&(_, child)) = self.nodes[node].children.get(idx) {
                top.1 += 1;
                order.extend(self.nodes[child].point);
                stack.push((child, 0));
            } else {
                stack.pop();
            }
        }
        order
    }
}

/// Nearest neighbour from the start, then 2-opt on the interior order.
pub fn solve_heuristic<B: BaseGroup>(group: &B, inst: &TspInstance<B::Elem>) -> TspSolution<B::Elem> {
    let k = inst.points.len();
    let d = distance_matrix(group, inst);
    let (a, b) = (k, k + 1);
    let mut unvisited: Vec<usize> = (0..k).collect();
    let mut seq = Vec::with_capacity(k);
    let mut cur = a;
    while !unvisited.is_empty() {
        let (pos, _) = unvisited
            .iter()
            .enumerate()
            .min_by_key(|&(_, &j)| (d[cur][j], j))
            .expect("non-empty");
        cur = unvisited.remove(pos);
        seq.push(cur);
    }
    let at = |seq: &[usize], i: isize| -> usize {
        if i < 0 {
            a
        } else if i as usize >= seq.len() {
            b
        } else {
            seq[i as usize]
        }
    };
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..k {
            for j in i + 1..k {
                let (p, q) = (at(&seq, i as isize - 1), at(&seq, j as isize + 1));
                let before = d[p][seq[i]] + d[seq[j]][q];
                let after = d[p][seq[j]] + d[seq[i]][q];
                if after < before {
                    seq[i..=j].reverse();
                    improved = true;
                }
            }
        }
    }
    let order: Vec<B::Elem> = seq.iter().map(|&j| inst.points[j].clone()).collect();
    let value = path_length(group, &inst.start, &order, &inst.end);
    TspSolution {
        value,
        order,
        exact: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{FreeGroup, Lattice, Word};

    fn f2() -> FreeGroup {
        FreeGroup::new(2).unwrap()
    }

    fn w(s: &str) -> Word {
        f2().parse(s).unwrap()
    }

    fn inst(start: &str, points: &[&str], end: &str) -> TspInstance<Word> {
        TspInstance::new(w(start), points.iter().map(|p| w(p)), w(end))
    }

    #[test]
    fn empty_and_singleton() {
        let g = f2();
        let i = inst("ab", &[], "Ba");
        for s in [
            solve_dp(&g, &i, 20).unwrap(),
            solve_tree(&g, &i).unwrap(),
            brute_force(&g, &i).unwrap(),
        ] {
            assert_eq!(s.value, g.distance(&w("ab"), &w("Ba")));
            assert!(s.order.is_empty());
        }
        let i = inst("1", &["bb"], "a");
        assert_eq!(solve_dp(&g, &i, 20).unwrap().value, 2 + 3);
        assert_eq!(solve_tree(&g, &i).unwrap().value, 5);
    }

    #[test]
    fn two_point_instance_by_hand() {
        // orders: (b, ab) -> 1 + 3 + 1 = 5, (ab, b) -> 2 + 3 + 2 = 7
        let g = f2();
        let i = inst("1", &["b", "ab"], "a");
        assert_eq!(path_length(&g, &w("1"), &[w("b"), w("ab")], &w("a")), 5);
        assert_eq!(path_length(&g, &w("1"), &[w("ab"), w("b")], &w("a")), 7);
        let dp = solve_dp(&g, &i, 20).unwrap();
        assert_eq!(dp.value, 5);
        assert_eq!(dp.order, vec![w("b"), w("ab")]);
        assert_eq!(brute_force(&g, &i).unwrap(), dp);
        let tree = solve_tree(&g, &i).unwrap();
        assert_eq!(tree.value, 5);
        assert_eq!(path_length(&g, &w("1"), &tree.order, &w("a")), 5);
    }

    #[test]
    fn axis_instance() {
        // 3 + 7 + 4 = 14 along the a-axis with two one-step branches
        let g = f2();
        let i = inst("1", &["aab", "aaaaaaab"], &"a".repeat(10));
        assert_eq!(brute_force(&g, &i).unwrap().value, 14);
        assert_eq!(solve_tree(&g, &i).unwrap().value, 14);
        assert_eq!(solve_dp(&g, &i, 20).unwrap().value, 14);
    }

    #[test]
    fn guards() {
        let g = f2();
        let pts: Vec<String> = (1..=10).map(|n| "b".repeat(n)).collect();
        let refs: Vec<&str> = pts.iter().map(|s| s.as_str()).collect();
        let i = inst("1", &refs, "a");
        assert!(matches!(
            brute_force(&g, &i),
            Err(Error::BruteForceGuard { size: 10, .. })
        ));
        assert!(matches!(
            solve_dp(&g, &i, 9),
            Err(Error::CapExceeded { size: 10, cap: 9 })
        ));
        let z2 = Lattice::new(2).unwrap();
        let li = TspInstance::new(z2.identity(), [], z2.identity());
        assert!(matches!(solve_tree(&z2, &li), Err(Error::NotATree)));
    }

    #[test]
    fn lattice_dp_and_heuristic() {
        let z2 = Lattice::new(2).unwrap();
        let p = |c: [i64; 2]| z2.point(&c).unwrap();
        let i = TspInstance::new(p([0, 0]), [p([2, 0]), p([2, 2]), p([0, 2])], p([0, 0]));
        let dp = solve_dp(&z2, &i, 20).unwrap();
        assert_eq!(dp.value, 8);
        assert_eq!(dp, brute_force(&z2, &i).unwrap());
        let h = solve_heuristic(&z2, &i);
        assert!(!h.exact);
        assert!(h.value >= dp.value);
        let policy = SolverPolicy::Approximate { cap: 2 };
        assert!(!solve(&z2, &i, policy).unwrap().exact);
        assert!(solve(&z2, &i, SolverPolicy::default()).unwrap().exact);
    }

    #[test]
    fn line_tree_solver() {
        let z = Lattice::new(1).unwrap();
        let p = |x: i64| z.point(&[x]).unwrap();
        let i = TspInstance::new(p(2), [p(-3), p(5), p(0)], p(1));
        let tree = solve_tree(&z, &i).unwrap();
        // span [-3, 5] = 8 edges, value 16 - 1
        assert_eq!(tree.value, 15);
        assert_eq!(tree.value, brute_force(&z, &i).unwrap().value);
        assert_eq!(path_length(&z, &p(2), &tree.order, &p(1)), 15);
    }
}
