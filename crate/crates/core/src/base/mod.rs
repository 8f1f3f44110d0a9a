//! Base groups `H` of the wreath product.
//!
//! Two families are provided: free groups `F_k` with their free generating
//! set, whose Cayley graph is a tree, and the integer lattice `Z^d` with the
//! unit vectors, used as a control. Every downstream quantity (TSP values,
//! word lengths, projections) is exact for both.

use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};

mod free;
mod lattice;

pub use free::{FreeGroup, FreeTracker, Word};
pub use lattice::{Lattice, LatticeTracker, Point};

/// Signed generator index: `+i` is the `i`-th generator, `-i` its inverse.
pub type Letter = i8;

/// Index of a vertex interned by a [`PositionTracker`].
pub type NodeId = u32;

/// A finitely generated group with a computable word metric and exact geodesics.
pub trait BaseGroup: Clone + Debug + Send + Sync {
    type Elem: Clone + Eq + Ord + Hash + Debug + Send + Sync;
    type Tracker: PositionTracker<Self>;

    fn identity(&self) -> Self::Elem;

    fn multiply(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;

    fn inverse(&self, x: &Self::Elem) -> Self::Elem;

    /// Word length with respect to the standard symmetric generating set.
    fn length(&self, x: &Self::Elem) -> u64;

    /// `d_H(x, y) = |x^{-1} y|`.
    fn distance(&self, x: &Self::Elem, y: &Self::Elem) -> u64 {
        self.length(&self.multiply(&self.inverse(x), y))
    }

    /// The symmetric generating set `S_H`, in a fixed documented order.
    fn generators(&self) -> Vec<Self::Elem>;

    fn geodesic(&self, x: &Self::Elem, y: &Self::Elem) -> GeodesicSegment<Self::Elem>;

    /// Whether the Cayley graph for `S_H` is a tree.
    fn is_tree(&self) -> bool;

    /// Normal form as a geodesic word from the identity, when the Cayley graph is a tree.
    fn tree_word(&self, x: &Self::Elem) -> Option<Vec<Letter>>;

    /// Checks that `x` belongs to this group instance.
    fn validate(&self, x: &Self::Elem) -> Result<()>;

    /// Parses a word over `a..z` (capitals are inverses); `1` or the empty string is the identity.
    fn parse(&self, s: &str) -> Result<Self::Elem>;

    fn format(&self, x: &Self::Elem) -> String;

    fn tracker(&self) -> Self::Tracker;

    /// Vertex of `segment` closest to `p` together with the distance.
    ///
    /// Ties are broken by the smallest vertex in the element order; in a tree
    /// the minimizer is unique.
    fn project_to_geodesic(
        &self,
        p: &Self::Elem,
        segment: &GeodesicSegment<Self::Elem>,
    ) -> Result<(Self::Elem, u64)> {
        let mut best: Option<(&Self::Elem, u64)> = None;
        for v in segment.vertices() {
            let d = self.distance(p, v);
            best = match best {
                Some((bv, bd)) if bd < d || (bd == d && bv <= v) => Some((bv, bd)),
                _ => Some((v, d)),
            };
        }
        best.map(|(v, d)| (v.clone(), d)).ok_or(Error::EmptySegment)
    }

    /// `d_H(p, segment)`.
    fn distance_to_geodesic(
        &self,
        p: &Self::Elem,
        segment: &GeodesicSegment<Self::Elem>,
    ) -> Result<u64> {
        self.project_to_geodesic(p, segment).map(|(_, d)| d)
    }
}

/// A geodesic vertex path; consecutive vertices are at distance one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicSegment<E> {
    vertices: Vec<E>,
}

impl<E> GeodesicSegment<E> {
    pub(crate) fn from_vertices(vertices: Vec<E>) -> Self {
        debug_assert!(!vertices.is_empty());
        GeodesicSegment { vertices }
    }

    pub fn vertices(&self) -> &[E] {
        &self.vertices
    }

    /// Number of edges.
    pub fn len(&self) -> u64 {
        self.vertices.len().saturating_sub(1) as u64
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn first(&self) -> &E {
        &self.vertices[0]
    }

    pub fn last(&self) -> &E {
        &self.vertices[self.vertices.len() - 1]
    }

    /// Vertex at distance `offset` from the start.
    pub fn at(&self, offset: u64) -> Option<&E> {
        self.vertices.get(usize::try_from(offset).ok()?)
    }
}

/// Incremental interning of base-group vertices visited by a walk.
///
/// The walk engine keeps lamp states per interned vertex, which avoids
/// re-materialising long words at every step. Node `0` is the identity.
pub trait PositionTracker<G: BaseGroup>: Send {
    fn origin(&self) -> NodeId {
        0
    }

    /// Number of interned vertices.
    fn node_count(&self) -> usize;

    /// Vertex `from * by`, interning every vertex on the way.
    fn translate(&mut self, from: NodeId, by: &G::Elem) -> NodeId;

    fn element(&self, node: NodeId) -> G::Elem;

    /// Distance from the identity.
    fn depth(&self, node: NodeId) -> u64;

    fn distance(&self, u: NodeId, v: NodeId) -> u64;

    /// Edge count of the minimal subtree spanning the origin, `end` and `marked`.
    /// `None` when the Cayley graph is not a tree.
    fn spanning_tree_edges(&mut self, end: NodeId, marked: &[NodeId]) -> Option<u64>;

    /// `max_v d_H(v, [origin, end])` over `visited`.
    fn max_geodesic_deviation(&mut self, end: NodeId, visited: &[NodeId]) -> u64;
}

pub(crate) fn letter_from_char(c: char) -> Option<Letter> {
    match c {
        'a'..='z' => Some((c as u8 - b'a' + 1) as Letter),
        'A'..='Z' => Some(-((c as u8 - b'A' + 1) as Letter)),
        _ => None,
    }
}

pub(crate) fn letter_to_char(l: Letter) -> char {
    let i = l.unsigned_abs() - 1;
    if l > 0 {
        (b'a' + i) as char
    } else {
        (b'A' + i) as char
    }
}

pub(crate) fn parse_letters(s: &str, rank: usize) -> Result<Vec<Letter>> {
    let s = s.trim();
    if s.is_empty() || s == "1" {
        return Ok(Vec::new());
    }
    s.chars()
        .map(|c| {
            let l = letter_from_char(c)
                .ok_or_else(|| Error::parse(s, format!("invalid letter `{c}`")))?;
            if l.unsigned_abs() as usize > rank {
                return Err(Error::GeneratorOutOfRange {
                    index: l as i64,
                    rank,
                });
            }
            Ok(l)
        })
        .collect()
}
