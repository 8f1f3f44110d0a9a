//! The wreath product `G = A ≀ H = (⊕_H A) ⋊ H`.
//!
//! Elements are pairs `(f, h)` of a finitely supported lamp configuration and
//! a lamplighter position. The product is
//! `(f1, h1)(f2, h2) = (f1 · (h1.f2), h1 h2)` where `(h.f)(x) = f(h^{-1} x)`.
//! For the standard generating set `{(δ_a, id)} ∪ {(0, s)}` the word length is
//! `TSP(id, supp f, h) + Σ_{x ∈ supp f} |f(x)|_{S_A}`.

use std::collections::{BTreeMap, HashMap};

use crate::base::BaseGroup;
use crate::error::{Error, Result};
use crate::lamp::LampGroup;
use crate::tsp::{self, SolverPolicy, TspInstance, TspSolution};

/// Default guard for [`Wreath::bfs_oracle`].
pub const BFS_BALL_LIMIT: usize = 10_000_000;

/// Finitely supported `f: H -> A`, never storing identity lamps.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LampConfig<E, V> {
    lamps: BTreeMap<E, V>,
}

impl<E: Ord, V> Default for LampConfig<E, V> {
    fn default() -> Self {
        LampConfig {
            lamps: BTreeMap::new(),
        }
    }
}

impl<E: Ord + Clone, V: Clone + Eq> LampConfig<E, V> {
    pub fn get(&self, x: &E) -> Option<&V> {
        self.lamps.get(x)
    }

    pub fn support(&self) -> impl Iterator<Item = &E> {
        self.lamps.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&E, &V)> {
        self.lamps.iter()
    }

    pub fn len(&self) -> usize {
        self.lamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lamps.is_empty()
    }

    /// Multiplies the lamp at `x` on the right by `v`, dropping it if it becomes trivial.
    pub fn apply<L: LampGroup<Value = V>>(&mut self, lamp: &L, x: E, v: &V) {
        use std::collections::btree_map::Entry;
        match self.lamps.entry(x) {
            Entry::Vacant(e) => {
                if !lamp.is_identity(v) {
                    e.insert(v.clone());
                }
            }
            Entry::Occupied(mut e) => {
                let new = lamp.multiply(e.get(), v);
                if lamp.is_identity(&new) {
                    e.remove();
                } else {
                    *e.get_mut() = new;
                }
            }
        }
    }
}

/// The group element `(f, h)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WreathElement<E, V> {
    pub lamps: LampConfig<E, V>,
    pub position: E,
}

/// Word length split into its TSP and lamp parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordLength<E> {
    pub tsp: TspSolution<E>,
    pub lamp_cost: u64,
}

impl<E> WordLength<E> {
    pub fn total(&self) -> u64 {
        self.tsp.value + self.lamp_cost
    }
}

pub type Element<L, B> = WreathElement<<B as BaseGroup>::Elem, <L as LampGroup>::Value>;

/// `A ≀ H` for a lamp group `A` and a base group `H`.
#[derive(Clone, Debug)]
pub struct Wreath<L, B> {
    lamp: L,
    base: B,
    policy: SolverPolicy,
}

impl<L: LampGroup, B: BaseGroup> Wreath<L, B> {
    pub fn new(lamp: L, base: B) -> Self {
        Wreath {
            lamp,
            base,
            policy: SolverPolicy::default(),
        }
    }

    pub fn with_policy(mut self, policy: SolverPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn lamp(&self) -> &L {
        &self.lamp
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn policy(&self) -> SolverPolicy {
        self.policy
    }

    pub fn identity(&self) -> Element<L, B> {
        WreathElement {
            lamps: LampConfig::default(),
            position: self.base.identity(),
        }
    }

    /// Builds `(f, h)` from arbitrary lamp pairs, multiplying repeated keys in order.
    pub fn element(
        &self,
        lamps: impl IntoIterator<Item = (B::Elem, L::Value)>,
        position: B::Elem,
    ) -> Element<L, B> {
        let mut config = LampConfig::default();
        for (x, v) in lamps {
            config.apply(&self.lamp, x, &v);
        }
        WreathElement {
            lamps: config,
            position,
        }
    }

    /// `(δ_a, id_H)`.
    pub fn lamp_generator(&self, a: L::Value) -> Element<L, B> {
        self.element([(self.base.identity(), a)], self.base.identity())
    }

    /// `(0, h)`.
    pub fn translation(&self, h: B::Elem) -> Element<L, B> {
        self.element([], h)
    }

    /// The standard generating set: lamp generators first, then base generators.
    pub fn generators(&self) -> Vec<Element<L, B>> {
        let mut s: Vec<_> = self
            .lamp
            .generators()
            .into_iter()
            .map(|a| self.lamp_generator(a))
            .collect();
        s.extend(self.base.generators().into_iter().map(|h| self.translation(h)));
        s
    }

    pub fn multiply(&self, g1: &Element<L, B>, g2: &Element<L, B>) -> Element<L, B> {
        let mut lamps = g1.lamps.clone();
        for (x, v) in g2.lamps.iter() {
            lamps.apply(&self.lamp, self.base.multiply(&g1.position, x), v);
        }
        WreathElement {
            lamps,
            position: self.base.multiply(&g1.position, &g2.position),
        }
    }

    /// `(f, h)^{-1} = (h^{-1}.f^{-1}, h^{-1})`.
    pub fn invert(&self, g: &Element<L, B>) -> Element<L, B> {
        let h_inv = self.base.inverse(&g.position);
        let lamps: Vec<_> = g
            .lamps
            .iter()
            .map(|(x, v)| (self.base.multiply(&h_inv, x), self.lamp.inverse(v)))
            .collect();
        self.element(lamps, h_inv)
    }

    /// `Σ_{x ∈ supp f} |f(x)|_{S_A}`; the support size for finite `A`.
    pub fn lamp_cost(&self, f: &LampConfig<B::Elem, L::Value>) -> u64 {
        f.iter().map(|(_, v)| self.lamp.cost(v)).sum()
    }

    pub fn word_length_detail(&self, g: &Element<L, B>) -> Result<WordLength<B::Elem>> {
        let inst = TspInstance::new(
            self.base.identity(),
            g.lamps.support().cloned(),
            g.position.clone(),
        );
        Ok(WordLength {
            tsp: tsp::solve(&self.base, &inst, self.policy)?,
            lamp_cost: self.lamp_cost(&g.lamps),
        })
    }

    /// `|g|_S`; errors when an exact solve would exceed the DP cap.
    pub fn word_length(&self, g: &Element<L, B>) -> Result<u64> {
        let detail = self.word_length_detail(g)?;
        if !detail.tsp.exact {
            debug_assert!(matches!(self.policy, SolverPolicy::Approximate { .. }));
        }
        Ok(detail.total())
    }

    /// `d(g1, g2) = |g1^{-1} g2|_S`.
    pub fn distance(&self, g1: &Element<L, B>, g2: &Element<L, B>) -> Result<u64> {
        self.word_length(&self.multiply(&self.invert(g1), g2))
    }

    /// Breadth-first distances from the identity over the ball of `radius`.
    pub fn bfs_oracle(&self, radius: u64) -> Result<HashMap<Element<L, B>, u64>> {
        self.bfs_oracle_with_limit(radius, BFS_BALL_LIMIT)
    }

    pub fn bfs_oracle_with_limit(
        &self,
        radius: u64,
        limit: usize,
    ) -> Result<HashMap<Element<L, B>, u64>> {
        let gens = self.generators();
        let mut dist = HashMap::from([(self.identity(), 0u64)]);
        let mut frontier = vec![self.identity()];
        for r in 1..=radius {
            let mut next = Vec::new();
            for g in &frontier {
                for s in &gens {
                    let h = self.multiply(g, s);
                    if !dist.contains_key(&h) {
                        if dist.len() >= limit {
                            return Err(Error::BallTooLarge { limit });
                        }
                        dist.insert(h.clone(), r);
                        next.push(h);
                    }
                }
            }
            frontier = next;
        }
        Ok(dist)
    }

    /// Canonical text form `x=v,y=w;h` (sorted support, reduced position).
    pub fn format_element(&self, g: &Element<L, B>) -> String {
        let lamps: Vec<String> = g
            .lamps
            .iter()
            .map(|(x, v)| format!("{}={}", self.base.format(x), self.lamp.format_value(v)))
            .collect();
        format!("{};{}", lamps.join(","), self.base.format(&g.position))
    }

    /// Inverse of [`Wreath::format_element`]; a string without `;` is a bare position.
    pub fn parse_element(&self, s: &str) -> Result<Element<L, B>> {
        let (lamps, pos) = match s.split_once(';') {
            Some((l, p)) => (l, p),
            None => ("", s),
        };
        let mut pairs = Vec::new();
        for item in lamps.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (x, v) = item
                .split_once('=')
                .ok_or_else(|| Error::parse(item, "lamp must be `word=value`"))?;
            pairs.push((self.base.parse(x)?, self.lamp.parse_value(v)?));
        }
        Ok(self.element(pairs, self.base.parse(pos)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{FreeGroup, Lattice, Word};
    use crate::lamp::{FiniteLampGroup, IntegerLamps};

    type Z2F2 = Wreath<FiniteLampGroup, FreeGroup>;

    fn z2f2() -> Z2F2 {
        Wreath::new(FiniteLampGroup::cyclic(2).unwrap(), FreeGroup::new(2).unwrap())
    }

    fn w(s: &str) -> Word {
        FreeGroup::new(2).unwrap().parse(s).unwrap()
    }

    #[test]
    fn product_formula_examples() {
        let g = z2f2();
        let x = g.parse_element("1=1;a").unwrap();
        let y = g.parse_element("1=1;b").unwrap();
        assert_eq!(g.multiply(&g.identity(), &x), x);
        // (δ_id, a)(δ_id, b) = (δ_id + δ_a, ab)
        let xy = g.multiply(&x, &y);
        assert_eq!(xy, g.element([(w("1"), 1), (w("a"), 1)], w("ab")));
        let t = g.lamp_generator(1);
        assert_eq!(g.multiply(&t, &t), g.identity());
        assert!(g.multiply(&t, &t).lamps.is_empty());
    }

    #[test]
    fn inverse_examples() {
        let g = z2f2();
        assert_eq!(g.invert(&g.identity()), g.identity());
        assert_eq!(g.invert(&g.translation(w("a"))), g.translation(w("A")));
        let x = g.element([(w("a"), 1)], w("b"));
        assert_eq!(g.multiply(&x, &g.invert(&x)), g.identity());
        assert_eq!(g.multiply(&g.invert(&x), &x), g.identity());
    }

    #[test]
    fn lamp_cost_examples() {
        let g = z2f2();
        assert_eq!(g.lamp_cost(&LampConfig::default()), 0);
        assert_eq!(g.lamp_cost(&g.parse_element("a=1,b=1;1").unwrap().lamps), 2);
        let gz = Wreath::new(IntegerLamps::new(1).unwrap(), FreeGroup::new(2).unwrap());
        let x = gz.parse_element("a=3,b=-2;1").unwrap();
        assert_eq!(gz.lamp_cost(&x.lamps), 5);
    }

    #[test]
    fn word_length_examples() {
        let g = z2f2();
        assert_eq!(g.word_length(&g.identity()).unwrap(), 0);
        assert_eq!(g.word_length(&g.lamp_generator(1)).unwrap(), 1);
        // TSP(id, {b, ab}, a) = 5 plus two lamps
        let x = g.parse_element("b=1,ab=1;a").unwrap();
        assert_eq!(g.word_length(&x).unwrap(), 7);
    }

    #[test]
    fn bfs_small_balls() {
        let g = z2f2();
        let b0 = g.bfs_oracle(0).unwrap();
        assert_eq!(b0.len(), 1);
        assert_eq!(b0[&g.identity()], 0);
        let b1 = g.bfs_oracle(1).unwrap();
        assert_eq!(b1.len(), 6);
        assert!(matches!(
            g.bfs_oracle_with_limit(4, 50),
            Err(Error::BallTooLarge { limit: 50 })
        ));
    }

    #[test]
    fn bfs_agrees_with_formula_radius_4() {
        let g = z2f2();
        for (x, d) in g.bfs_oracle(4).unwrap() {
            assert_eq!(g.word_length(&x).unwrap(), d, "{}", g.format_element(&x));
        }
    }

    #[test]
    fn integer_lamps_bfs_agreement() {
        // Z lamps over F_2
        let g = Wreath::new(IntegerLamps::new(1).unwrap(), FreeGroup::new(2).unwrap());
        for (x, d) in g.bfs_oracle(4).unwrap() {
            assert_eq!(g.word_length(&x).unwrap(), d);
        }
    }

    #[test]
    fn lattice_base_bfs_agreement() {
        // Z/3 lamps over Z^2 uses the subset DP
        let g = Wreath::new(FiniteLampGroup::cyclic(3).unwrap(), Lattice::new(2).unwrap());
        for (x, d) in g.bfs_oracle(4).unwrap() {
            assert_eq!(g.word_length(&x).unwrap(), d);
        }
    }

    #[test]
    fn text_form_roundtrip() {
        let g = z2f2();
        let x = g.parse_element("ab=1,B=1;aB").unwrap();
        assert_eq!(g.format_element(&x), "B=1,ab=1;aB");
        assert_eq!(g.parse_element(&g.format_element(&x)).unwrap(), x);
        assert_eq!(g.format_element(&g.identity()), ";1");
        assert!(g.parse_element("a=2;1").is_err());
        assert!(g.parse_element("a;1").is_err());
    }
}
