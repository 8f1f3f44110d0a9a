//! Step distributions `μ` on `A ≀ H`.

use std::collections::HashMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base::BaseGroup;
use crate::error::{Error, Result};
use crate::lamp::LampGroup;
use crate::wreath::{Element, Wreath};

/// Tolerance on the total mass before renormalising.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Generator stream for sample `stream` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform on `[0, 1)` from the top 53 bits of one `u64`.
pub(crate) fn unit_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform index below `len` from one `u64` (multiply-shift).
pub(crate) fn index_below<R: RngCore + ?Sized>(rng: &mut R, len: usize) -> usize {
    ((rng.next_u64() as u128 * len as u128) >> 64) as usize
}

/// A word `s_1 ⋯ s_L` of i.i.d. uniform letters from the standard generating
/// set, with `P(L = k) = (1 - q) q^k`.
///
/// Reversing and inverting the letters preserves the law, so the step is
/// symmetric. `E exp(α |X|) < ∞` for every `α < -ln q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricTail {
    /// Probability of drawing a tail step instead of an atom.
    pub weight: f64,
    pub q: f64,
}

impl GeometricTail {
    pub fn mean_length(&self) -> f64 {
        self.q / (1.0 - self.q)
    }

    /// Supremum of the admissible exponential-moment parameters.
    pub fn alpha_sup(&self) -> f64 {
        -self.q.ln()
    }
}

/// `μ` as finitely many atoms plus an optional geometric tail.
///
/// Random draws per step: one `u64` chooses between the atoms (inverse CDF in
/// atom order) and the tail. A tail step then uses one `u64` per geometric
/// trial (`L + 1` in total) and one `u64` per letter.
#[derive(Clone, Debug)]
pub struct StepDistribution<L: LampGroup, B: BaseGroup> {
    /// Atoms followed by the tail letters.
    pieces: Vec<Element<L, B>>,
    atom_count: usize,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
    tail: Option<GeometricTail>,
    symmetric: bool,
}

impl<L: LampGroup, B: BaseGroup> StepDistribution<L, B> {
    /// Validates masses and, when `symmetric` is claimed, `μ(g) = μ(g^{-1})`.
    pub fn new(
        wreath: &Wreath<L, B>,
        atoms: Vec<(Element<L, B>, f64)>,
        tail: Option<GeometricTail>,
        symmetric: bool,
    ) -> Result<Self> {
        if atoms.is_empty() && tail.is_none() {
            return Err(Error::Distribution("no atoms and no tail".into()));
        }
        for (g, p) in &atoms {
            if !(p.is_finite() && *p > 0.0) {
                return Err(Error::Distribution(format!(
                    "atom {} has non-positive probability {p}",
                    wreath.format_element(g)
                )));
            }
        }
        if let Some(t) = &tail {
            if !(t.weight.is_finite() && t.weight > 0.0) {
                return Err(Error::Distribution(format!("tail weight {} must be positive", t.weight)));
            }
            if !(t.q > 0.0 && t.q < 1.0) {
                return Err(Error::Distribution(format!("tail parameter q = {} outside (0, 1)", t.q)));
            }
        }
        let total: f64 = atoms.iter().map(|(_, p)| p).sum::<f64>() + tail.map_or(0.0, |t| t.weight);
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Distribution(format!("total mass {total} is not 1")));
        }
        if symmetric {
            let mut mass: HashMap<&Element<L, B>, f64> = HashMap::new();
            for (g, p) in &atoms {
                *mass.entry(g).or_default() += p;
            }
            for (g, p) in &mass {
                let q = mass.get(&wreath.invert(g)).copied().unwrap_or(0.0);
                if (p - q).abs() > MASS_TOLERANCE {
                    return Err(Error::Distribution(format!(
                        "claimed symmetric but mu({}) = {p} differs from the mass {q} of its inverse",
                        wreath.format_element(g)
                    )));
                }
            }
        }
        let atom_count = atoms.len();
        let mut pieces = Vec::with_capacity(atom_count);
        let mut probs = Vec::with_capacity(atom_count);
        for (g, p) in atoms {
            pieces.push(g);
            probs.push(p / total);
        }
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let tail = tail.map(|t| GeometricTail {
            weight: t.weight / total,
            q: t.q,
        });
        match tail {
            Some(_) => pieces.extend(wreath.generators()),
            None => {
                if let Some(last) = cumulative.last_mut() {
                    *last = 1.0;
                }
            }
        }
        Ok(StepDistribution {
            pieces,
            atom_count,
            probs,
            cumulative,
            tail,
            symmetric,
        })
    }

    /// Uniform on the standard generating set, in [`Wreath::generators`] order.
    pub fn uniform_generators(wreath: &Wreath<L, B>) -> Result<Self> {
        let gens = wreath.generators();
        let p = 1.0 / gens.len() as f64;
        let atoms = gens.into_iter().map(|g| (g, p)).collect();
        Self::new(wreath, atoms, None, true)
    }

    /// A pure geometric-length generator word.
    pub fn geometric_word(wreath: &Wreath<L, B>, q: f64) -> Result<Self> {
        Self::new(wreath, Vec::new(), Some(GeometricTail { weight: 1.0, q }), true)
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Element<L, B>, f64)> {
        self.pieces[..self.atom_count].iter().zip(self.probs.iter().copied())
    }

    pub fn tail(&self) -> Option<GeometricTail> {
        self.tail
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_finitely_supported(&self) -> bool {
        self.tail.is_none()
    }

    pub(crate) fn piece(&self, i: usize) -> &Element<L, B> {
        &self.pieces[i]
    }

    /// Pushes the pieces whose product is the next step onto `out`.
    pub(crate) fn draw_into<R: RngCore + ?Sized>(&self, rng: &mut R, out: &mut Vec<usize>) {
        let u = unit_f64(rng);
        if let Some(i) = self.cumulative.iter().position(|&c| u < c) {
            out.push(i);
            return;
        }
        let tail = self.tail.expect("atom masses sum to one without a tail");
        let letters = self.pieces.len() - self.atom_count;
        let mut len = 0usize;
        while unit_f64(rng) < tail.q {
            len += 1;
        }
        for _ in 0..len {
            out.push(self.atom_count + index_below(rng, letters));
        }
    }

    /// One step `X ~ μ` as a group element.
    pub fn sample_step<R: RngCore + ?Sized>(&self, wreath: &Wreath<L, B>, rng: &mut R) -> Element<L, B> {
        let mut idx = Vec::new();
        self.draw_into(rng, &mut idx);
        idx.iter()
            .fold(wreath.identity(), |g, &i| wreath.multiply(&g, &self.pieces[i]))
    }
}
