use std::collections::HashMap;
use std::fmt;

use super::{
    letter_to_char, parse_letters, BaseGroup, GeodesicSegment, Letter, NodeId, PositionTracker,
};
use crate::error::{Error, Result};

/// A vertex of `Z^d`.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(Vec<i64>);

impl Point {
    pub fn new(coords: Vec<i64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// The lattice `Z^d` with the unit vectors as generators.
///
/// Not acylindrically hyperbolic; serves as the control base group. For
/// `d = 1` the Cayley graph is a line, hence a tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
}

impl Lattice {
    pub fn new(dim: usize) -> Result<Self> {
        if !(1..=26).contains(&dim) {
            return Err(Error::InvalidGroup(format!(
                "lattice dimension must be in 1..=26, got {dim}"
            )));
        }
        Ok(Lattice { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, coords: &[i64]) -> Result<Point> {
        if coords.len() != self.dim {
            return Err(Error::InvalidGroup(format!(
                "expected {} coordinates, got {}",
                self.dim,
                coords.len()
            )));
        }
        Ok(Point(coords.to_vec()))
    }
}

impl BaseGroup for Lattice {
    type Elem = Point;
    type Tracker = LatticeTracker;

    fn identity(&self) -> Point {
        Point(vec![0; self.dim])
    }

    fn multiply(&self, x: &Point, y: &Point) -> Point {
        Point(x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect())
    }

    fn inverse(&self, x: &Point) -> Point {
        Point(x.0.iter().map(|a| -a).collect())
    }

    fn length(&self, x: &Point) -> u64 {
        x.0.iter().map(|a| a.unsigned_abs()).sum()
    }

    fn distance(&self, x: &Point, y: &Point) -> u64 {
        x.0.iter().zip(&y.0).map(|(a, b)| a.abs_diff(*b)).sum()
    }

    fn generators(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(2 * self.dim);
        for i in 0..self.dim {
            for s in [1, -1] {
                let mut c = vec![0; self.dim];
                c[i] = s;
                out.push(Point(c));
            }
        }
        out
    }

    /// Staircase path fixing coordinates in index order.
    fn geodesic(&self, x: &Point, y: &Point) -> GeodesicSegment<Point> {
        let mut cur = x.clone();
        let mut vertices = vec![cur.clone()];
        for i in 0..self.dim {
            let step = (y.0[i] - cur.0[i]).signum();
            while cur.0[i] != y.0[i] {
                cur.0[i] += step;
                vertices.push(cur.clone());
            }
        }
        GeodesicSegment::from_vertices(vertices)
    }

    fn is_tree(&self) -> bool {
        self.dim == 1
    }

    fn tree_word(&self, x: &Point) -> Option<Vec<Letter>> {
        if self.dim != 1 {
            return None;
        }
        let v = x.0[0];
        Some(vec![v.signum() as Letter; v.unsigned_abs() as usize])
    }

    fn validate(&self, x: &Point) -> Result<()> {
        if x.0.len() != self.dim {
            return Err(Error::InvalidGroup(format!(
                "point {x:?} is not in Z^{}",
                self.dim
            )));
        }
        Ok(())
    }

    fn parse(&self, s: &str) -> Result<Point> {
        let mut c = vec![0i64; self.dim];
        for l in parse_letters(s, self.dim)? {
            c[l.unsigned_abs() as usize - 1] += l.signum() as i64;
        }
        Ok(Point(c))
    }

    fn format(&self, x: &Point) -> String {
        let mut s = String::new();
        for (i, &v) in x.0.iter().enumerate() {
            let l = (i + 1) as Letter * v.signum() as Letter;
            for _ in 0..v.unsigned_abs() {
                s.push(letter_to_char(l));
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }

    fn tracker(&self) -> LatticeTracker {
        LatticeTracker::new(*self)
    }
}

/// Interning table for lattice points visited by a walk.
#[derive(Clone, Debug)]
pub struct LatticeTracker {
    lattice: Lattice,
    nodes: Vec<Point>,
    index: HashMap<Point, NodeId>,
}

impl LatticeTracker {
    pub fn new(lattice: Lattice) -> Self {
        let origin = lattice.identity();
        LatticeTracker {
            lattice,
            nodes: vec![origin.clone()],
            index: HashMap::from([(origin, 0)]),
        }
    }

    fn intern(&mut self, p: Point) -> NodeId {
        if let Some(&id) = self.index.get(&p) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(p.clone());
        self.index.insert(p, id);
        id
    }
}

impl PositionTracker<Lattice> for LatticeTracker {
    fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn translate(&mut self, from: NodeId, by: &Point) -> NodeId {
        if by.0.iter().all(|&c| c == 0) {
            return from;
        }
        let p = self.lattice.multiply(&self.nodes[from as usize], by);
        self.intern(p)
    }

    fn element(&self, node: NodeId) -> Point {
        self.nodes[node as usize].clone()
    }

    fn depth(&self, node: NodeId) -> u64 {
        self.lattice.length(&self.nodes[node as usize])
    }

    fn distance(&self, u: NodeId, v: NodeId) -> u64 {
        self.lattice
            .distance(&self.nodes[u as usize], &self.nodes[v as usize])
    }

    fn spanning_tree_edges(&mut self, end: NodeId, marked: &[NodeId]) -> Option<u64> {
        if self.lattice.dim != 1 {
            return None;
        }
        let (lo, hi) = marked
            .iter()
            .chain(std::iter::once(&end))
            .map(|&v| self.nodes[v as usize].0[0])
            .fold((0i64, 0i64), |(lo, hi), x| (lo.min(x), hi.max(x)));
        Some((hi - lo) as u64)
    }

    fn max_geodesic_deviation(&mut self, end: NodeId, visited: &[NodeId]) -> u64 {
        let origin = self.lattice.identity();
        let segment = self.lattice.geodesic(&origin, &self.nodes[end as usize]);
        visited
            .iter()
            .map(|&v| {
                self.lattice
                    .distance_to_geodesic(&self.nodes[v as usize], &segment)
                    .expect("geodesic segments are never empty")
            })
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        let z2 = Lattice::new(2).unwrap();
        let p = z2.parse("aaBa").unwrap();
        assert_eq!(p.coords(), &[3, -1]);
        assert_eq!(z2.format(&p), "aaaB");
        assert_eq!(z2.format(&z2.identity()), "1");
        assert!(z2.parse("c").is_err());
    }

    #[test]
    fn metric_and_geodesic() {
        let z2 = Lattice::new(2).unwrap();
        let x = z2.point(&[1, 2]).unwrap();
        let y = z2.point(&[-2, 0]).unwrap();
        assert_eq!(z2.distance(&x, &y), 5);
        let g = z2.geodesic(&x, &y);
        assert_eq!(g.len(), 5);
        assert_eq!(g.first(), &x);
        assert_eq!(g.last(), &y);
        for w in g.vertices().windows(2) {
            assert_eq!(z2.distance(&w[0], &w[1]), 1);
        }
    }

    #[test]
    fn projection_ties_take_smallest_vertex() {
        let z2 = Lattice::new(2).unwrap();
        let seg = z2.geodesic(&z2.point(&[0, 0]).unwrap(), &z2.point(&[2, 0]).unwrap());
        // (1, 1) is at distance 1 from (1, 0) only; (-1, 1) ties nowhere.
        let (v, d) = z2
            .project_to_geodesic(&z2.point(&[1, 1]).unwrap(), &seg)
            .unwrap();
        assert_eq!((v.coords().to_vec(), d), (vec![1, 0], 1));
        // a vertical segment and a point equidistant from two vertices
        let seg = z2.geodesic(&z2.point(&[0, 0]).unwrap(), &z2.point(&[1, 1]).unwrap());
        let (v, d) = z2
            .project_to_geodesic(&z2.point(&[0, 1]).unwrap(), &seg)
            .unwrap();
        assert_eq!(d, 1);
        assert_eq!(v.coords(), &[0, 0]);
    }

    #[test]
    fn line_is_a_tree() {
        let z = Lattice::new(1).unwrap();
        assert!(z.is_tree());
        assert_eq!(z.tree_word(&z.point(&[-3]).unwrap()), Some(vec![-1, -1, -1]));
        let mut t = z.tracker();
        let a = t.translate(0, &z.point(&[4]).unwrap());
        let b = t.translate(0, &z.point(&[-2]).unwrap());
        assert_eq!(t.spanning_tree_edges(a, &[b]), Some(6));
        assert_eq!(t.max_geodesic_deviation(a, &[b, a]), 2);
        assert!(!Lattice::new(2).unwrap().is_tree());
    }
}
