use std::fmt;

use super::{
    letter_to_char, parse_letters, BaseGroup, GeodesicSegment, Letter, NodeId, PositionTracker,
};
use crate::error::{Error, Result};

/// A reduced word in a free group: no adjacent pair `(i, -i)`.
///
/// Reduced words are the canonical form, so equality, ordering and hashing
/// are plain sequence operations.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Appends a letter, cancelling against the last one if needed.
    pub(crate) fn push_reduced(&mut self, l: Letter) {
        if self.0.last() == Some(&-l) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for &l in &self.0 {
            write!(f, "{}", letter_to_char(l))?;
        }
        Ok(())
    }
}

/// The free group `F_k` with its `2k` free generators `a, A, b, B, ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreeGroup {
    rank: usize,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Result<Self> {
        if !(2..=26).contains(&rank) {
            return Err(Error::InvalidGroup(format!(
                "free group rank must be in 2..=26, got {rank}"
            )));
        }
        Ok(FreeGroup { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Freely reduces a sequence of signed generator indices.
    pub fn reduce_word(&self, letters: &[i64]) -> Result<Word> {
        let mut out = Word::identity();
        for &l in letters {
            if l == 0 || l.unsigned_abs() as usize > self.rank {
                return Err(Error::GeneratorOutOfRange {
                    index: l,
                    rank: self.rank,
                });
            }
            out.push_reduced(l as Letter);
        }
        Ok(out)
    }

    /// Single-letter word.
    pub fn generator(&self, l: Letter) -> Word {
        debug_assert!(l != 0 && l.unsigned_abs() as usize <= self.rank);
        Word(vec![l])
    }
}

impl BaseGroup for FreeGroup {
    type Elem = Word;
    type Tracker = FreeTracker;

    fn identity(&self) -> Word {
        Word::identity()
    }

    fn multiply(&self, x: &Word, y: &Word) -> Word {
        let xs = x.letters();
        let ys = y.letters();
        let mut cancel = 0;
        while cancel < xs.len().min(ys.len()) && xs[xs.len() - 1 - cancel] == -ys[cancel] {
            cancel += 1;
        }
        let mut out = Vec::with_capacity(xs.len() + ys.len() - 2 * cancel);
        out.extend_from_slice(&xs[..xs.len() - cancel]);
        out.extend_from_slice(&ys[cancel..]);
        Word(out)
    }

    fn inverse(&self, x: &Word) -> Word {
        Word(x.letters().iter().rev().map(|&l| -l).collect())
    }

    fn length(&self, x: &Word) -> u64 {
        x.len() as u64
    }

    fn distance(&self, x: &Word, y: &Word) -> u64 {
        let c = common_prefix(x, y);
        (x.len() + y.len() - 2 * c) as u64
    }

    fn generators(&self) -> Vec<Word> {
        (1..=self.rank as Letter)
            .flat_map(|i| [Word(vec![i]), Word(vec![-i])])
            .collect()
    }

    fn geodesic(&self, x: &Word, y: &Word) -> GeodesicSegment<Word> {
        let c = common_prefix(x, y);
        let mut vertices = Vec::with_capacity(x.len() + y.len() - 2 * c + 1);
        for i in (c..=x.len()).rev() {
            vertices.push(Word(x.letters()[..i].to_vec()));
        }
        for j in c + 1..=y.len() {
            vertices.push(Word(y.letters()[..j].to_vec()));
        }
        GeodesicSegment::from_vertices(vertices)
    }

    fn is_tree(&self) -> bool {
        true
    }

    fn tree_word(&self, x: &Word) -> Option<Vec<Letter>> {
        Some(x.letters().to_vec())
    }

    fn validate(&self, x: &Word) -> Result<()> {
        for (i, &l) in x.letters().iter().enumerate() {
            if l == 0 || l.unsigned_abs() as usize > self.rank {
                return Err(Error::GeneratorOutOfRange {
                    index: l as i64,
                    rank: self.rank,
                });
            }
            if i > 0 && x.letters()[i - 1] == -l {
                return Err(Error::parse(format!("{x:?}"), "word is not reduced"));
            }
        }
        Ok(())
    }

    fn parse(&self, s: &str) -> Result<Word> {
        let letters = parse_letters(s, self.rank)?;
        let mut w = Word::identity();
        for l in letters {
            w.push_reduced(l);
        }
        Ok(w)
    }

    fn format(&self, x: &Word) -> String {
        format!("{x:?}")
    }

    fn tracker(&self) -> FreeTracker {
        FreeTracker::new(self.rank)
    }

    fn project_to_geodesic(
        &self,
        p: &Word,
        segment: &GeodesicSegment<Word>,
    ) -> Result<(Word, u64)> {
        if segment.is_empty() {
            return Err(Error::EmptySegment);
        }
        // Tree: the projection is the median of p and the two endpoints,
        // provided the segment is the geodesic between them.
        let (u, v) = (segment.first(), segment.last());
        let (pu, pv, uv) = (
            self.distance(p, u),
            self.distance(p, v),
            self.distance(u, v),
        );
        let offset = (pu + uv - pv) / 2;
        let vertex = segment.at(offset).ok_or(Error::EmptySegment)?;
        Ok((vertex.clone(), (pu + pv - uv) / 2))
    }
}

fn common_prefix(x: &Word, y: &Word) -> usize {
    x.letters()
        .iter()
        .zip(y.letters())
        .take_while(|(a, b)| a == b)
        .count()
}

const NONE: u32 = u32::MAX;

/// Arena over the vertices of the free-group Cayley tree visited by a walk.
///
/// Parents and skew-binary jump pointers give `O(log depth)` ancestor
/// queries; generation stamps make subtree marking allocation-free.
#[derive(Clone, Debug)]
pub struct FreeTracker {
    rank: usize,
    parent: Vec<u32>,
    letter: Vec<Letter>,
    depth: Vec<u32>,
    jump: Vec<u32>,
    children: Vec<u32>,
    stamp: Vec<u32>,
    generation: u32,
    meet: Vec<u32>,
}

impl FreeTracker {
    pub fn new(rank: usize) -> Self {
        FreeTracker {
            rank,
            parent: vec![0],
            letter: vec![0],
            depth: vec![0],
            jump: vec![0],
            children: vec![NONE; 2 * rank],
            stamp: vec![0],
            generation: 0,
            meet: Vec::new(),
        }
    }

    fn slot(&self, l: Letter) -> usize {
        if l > 0 {
            l as usize - 1
        } else {
            self.rank + (-l) as usize - 1
        }
    }

    /// Neighbour of `node` along generator `l`.
    pub fn step(&mut self, node: NodeId, l: Letter) -> NodeId {
        let n = node as usize;
        if n != 0 && self.letter[n] == -l {
            return self.parent[n];
        }
        let slot = n * 2 * self.rank + self.slot(l);
        let child = self.children[slot];
        if child != NONE {
            return child;
        }
        let id = self.parent.len() as u32;
        let j = self.jump[n] as usize;
        let jump = if n != 0
            && self.depth[n] - self.depth[j] == self.depth[j] - self.depth[self.jump[j] as usize]
        {
            self.jump[j]
        } else {
            node
        };
        self.parent.push(node);
        self.letter.push(l);
        self.depth.push(self.depth[n] + 1);
        self.jump.push(jump);
        self.children.extend(std::iter::repeat_n(NONE, 2 * self.rank));
        self.stamp.push(0);
        self.children[slot] = id;
        id
    }

    fn ancestor_at(&self, mut v: u32, d: u32) -> u32 {
        while self.depth[v as usize] > d {
            let j = self.jump[v as usize];
            v = if self.depth[j as usize] >= d {
                j
            } else {
                self.parent[v as usize]
            };
        }
        v
    }

    pub fn lca(&self, u: NodeId, v: NodeId) -> NodeId {
        let d = self.depth[u as usize].min(self.depth[v as usize]);
        let (mut u, mut v) = (self.ancestor_at(u, d), self.ancestor_at(v, d));
        while u != v {
            let (ju, jv) = (self.jump[u as usize], self.jump[v as usize]);
            if ju != jv {
                u = ju;
                v = jv;
            } else {
                u = self.parent[u as usize];
                v = self.parent[v as usize];
            }
        }
        u
    }

    fn next_generation(&mut self) -> u32 {
        if self.generation == u32::MAX {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 0;
        }
        self.generation += 1;
        self.generation
    }
}

impl PositionTracker<FreeGroup> for FreeTracker {
    fn node_count(&self) -> usize {
        self.parent.len()
    }

    fn translate(&mut self, from: NodeId, by: &Word) -> NodeId {
        by.letters().iter().fold(from, |v, &l| self.step(v, l))
    }

    fn element(&self, node: NodeId) -> Word {
        let mut letters = Vec::with_capacity(self.depth[node as usize] as usize);
        let mut v = node as usize;
        while v != 0 {
            letters.push(self.letter[v]);
            v = self.parent[v] as usize;
        }
        letters.reverse();
        Word(letters)
    }

    fn depth(&self, node: NodeId) -> u64 {
        self.depth[node as usize] as u64
    }

    fn distance(&self, u: NodeId, v: NodeId) -> u64 {
        let w = self.lca(u, v);
        (self.depth[u as usize] + self.depth[v as usize] - 2 * self.depth[w as usize]) as u64
    }

    fn spanning_tree_edges(&mut self, end: NodeId, marked: &[NodeId]) -> Option<u64> {
        let g = self.next_generation();
        self.stamp[0] = g;
        let mut edges = 0u64;
        for &start in marked.iter().chain(std::iter::once(&end)) {
            let mut v = start as usize;
            while self.stamp[v] != g {
                self.stamp[v] = g;
                edges += 1;
                v = self.parent[v] as usize;
            }
        }
        Some(edges)
    }

    fn max_geodesic_deviation(&mut self, end: NodeId, visited: &[NodeId]) -> u64 {
        let g = self.next_generation();
        let mut v = end as usize;
        loop {
            self.stamp[v] = g;
            if v == 0 {
                break;
            }
            v = self.parent[v] as usize;
        }
        // Parents precede children in the arena, so one forward pass finds
        // the vertex where each node's root path meets the geodesic.
        self.meet.clear();
        self.meet.reserve(self.parent.len());
        for v in 0..self.parent.len() {
            let m = if self.stamp[v] == g {
                v as u32
            } else {
                self.meet[self.parent[v] as usize]
            };
            self.meet.push(m);
        }
        visited
            .iter()
            .map(|&v| (self.depth[v as usize] - self.depth[self.meet[v as usize] as usize]) as u64)
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FreeGroup {
        FreeGroup::new(2).unwrap()
    }

    fn w(s: &str) -> Word {
        f2().parse(s).unwrap()
    }

    /// Independent reduction oracle: repeatedly delete the first cancelling pair.
    fn naive_reduce(letters: &[i64]) -> Vec<i64> {
        let mut v = letters.to_vec();
        loop {
            match (1..v.len()).find(|&i| v[i - 1] == -v[i]) {
                Some(i) => {
                    v.drain(i - 1..=i);
                }
                None => return v,
            }
        }
    }

    #[test]
    fn reduce_word_examples() {
        let g = f2();
        assert_eq!(g.reduce_word(&[]).unwrap(), Word::identity());
        assert_eq!(g.reduce_word(&[1, -1]).unwrap(), Word::identity());
        let expected = naive_reduce(&[1, 2, -2, 1]);
        assert_eq!(expected, vec![1, 1]);
        assert_eq!(g.reduce_word(&[1, 2, -2, 1]).unwrap(), w("aa"));
        assert!(matches!(
            g.reduce_word(&[3]),
            Err(Error::GeneratorOutOfRange { index: 3, rank: 2 })
        ));
        assert!(g.reduce_word(&[0]).is_err());
    }

    #[test]
    fn rank_guard() {
        assert!(FreeGroup::new(1).is_err());
        assert!(FreeGroup::new(27).is_err());
    }

    #[test]
    fn multiply_examples() {
        let g = f2();
        assert_eq!(g.multiply(&Word::identity(), &w("ab")), w("ab"));
        assert_eq!(g.multiply(&w("a"), &w("A")), Word::identity());
        assert_eq!(g.multiply(&w("ab"), &w("Ba")), w("aa"));
    }

    #[test]
    fn distance_examples() {
        let g = f2();
        assert_eq!(g.distance(&w("ab"), &w("ab")), 0);
        assert_eq!(g.distance(&w("a"), &w("ab")), 1);
        // |b^-1 a^5 b| = 7
        assert_eq!(g.length(&g.multiply(&g.inverse(&w("aab")), &w("aaaaaaab"))), 7);
        assert_eq!(g.distance(&w("aab"), &w("aaaaaaab")), 7);
    }

    #[test]
    fn geodesic_examples() {
        let g = f2();
        let s = g.geodesic(&w("ab"), &w("ab"));
        assert_eq!(s.vertices(), &[w("ab")]);
        let s = g.geodesic(&Word::identity(), &w("aa"));
        assert_eq!(s.vertices(), &[w("1"), w("a"), w("aa")]);
    }

    #[test]
    fn geodesic_through_common_prefix() {
        let g = FreeGroup::new(3).unwrap();
        let p = |s: &str| g.parse(s).unwrap();
        let s = g.geodesic(&p("ab"), &p("ac"));
        assert_eq!(s.vertices(), &[p("ab"), p("a"), p("ac")]);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn projection_examples() {
        let g = f2();
        let axis = g.geodesic(&Word::identity(), &w("aaaaa"));
        assert_eq!(g.project_to_geodesic(&w("aa"), &axis).unwrap(), (w("aa"), 0));
        assert_eq!(g.project_to_geodesic(&w("aab"), &axis).unwrap(), (w("aa"), 1));
        assert_eq!(g.project_to_geodesic(&w("bbb"), &axis).unwrap(), (w("1"), 3));
        // exhaustive minimum over vertices agrees
        for p in ["aab", "bbb", "aaaaaab", "Ab", "aaaB"] {
            let p = w(p);
            let best = axis
                .vertices()
                .iter()
                .map(|v| (g.distance(&p, v), v.clone()))
                .min()
                .unwrap();
            assert_eq!(g.project_to_geodesic(&p, &axis).unwrap(), (best.1, best.0));
        }
    }

    #[test]
    fn tracker_matches_words() {
        let g = f2();
        let mut t = g.tracker();
        let x = t.translate(0, &w("abAb"));
        let y = t.translate(0, &w("abbb"));
        assert_eq!(t.element(x), w("abAb"));
        assert_eq!(t.distance(x, y), g.distance(&w("abAb"), &w("abbb")));
        let back = t.translate(x, &w("BaBA"));
        assert_eq!(back, 0);
        assert_eq!(t.lca(x, y), t.translate(0, &w("ab")));
        // spanning tree of {1, ab, aB}: edges 1-a, a-ab, a-aB
        let u = t.translate(0, &w("aB"));
        let ab = t.translate(0, &w("ab"));
        assert_eq!(t.spanning_tree_edges(ab, &[u]), Some(3));
        assert_eq!(t.max_geodesic_deviation(ab, &[u, 0, ab]), 1);
    }

    #[test]
    fn tracker_lca_on_long_paths() {
        let g = f2();
        let mut t = g.tracker();
        let spine = w(&"a".repeat(300));
        let top = t.translate(0, &spine);
        for k in [0usize, 1, 7, 64, 150, 299] {
            let branch = t.translate(0, &w(&format!("{}b{}", "a".repeat(k), "a".repeat(5))));
            assert_eq!(t.depth(t.lca(branch, top)), k as u64);
            assert_eq!(t.distance(branch, top), (300 - k + 6) as u64);
        }
    }
}
