//! Lamp groups `A`.

use std::fmt::Debug;
use std::hash::Hash;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lamp group with a word length `|a|_{S_A}`.
pub trait LampGroup: Clone + Debug + Send + Sync {
    type Value: Clone + Eq + Ord + Hash + Debug + Send + Sync;

    fn identity(&self) -> Self::Value;

    fn multiply(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;

    fn inverse(&self, a: &Self::Value) -> Self::Value;

    /// `|a|_{S_A}`; zero exactly at the identity.
    fn cost(&self, a: &Self::Value) -> u64;

    /// The lamp part `S_A` of the standard generating set.
    fn generators(&self) -> Vec<Self::Value>;

    fn parse_value(&self, s: &str) -> Result<Self::Value>;

    fn format_value(&self, a: &Self::Value) -> String;

    fn is_identity(&self, a: &Self::Value) -> bool {
        *a == self.identity()
    }
}

/// JSON schema of a lamp-group table file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LampTable {
    pub order: usize,
    pub mul: Vec<Vec<usize>>,
}

/// A finite group given by its multiplication table.
///
/// Every non-identity element is a generator, so `|a|_{S_A} = 1` for
/// `a != id` and the lamp cost of a configuration is its support size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLampGroup {
    table: Vec<Vec<u32>>,
    identity: u32,
    inverses: Vec<u32>,
}

impl FiniteLampGroup {
    /// Validates the group axioms; the identity need not be index 0.
    pub fn from_table(table: &LampTable) -> Result<Self> {
        let n = table.order;
        if n < 2 {
            return Err(Error::LampTable(format!(
                "lamp group must be non-trivial, order {n}"
            )));
        }
        if table.mul.len() != n || table.mul.iter().any(|row| row.len() != n) {
            return Err(Error::LampTable(format!("table must be {n}x{n}")));
        }
        if let Some(bad) = table.mul.iter().flatten().find(|&&v| v >= n) {
            return Err(Error::LampTable(format!("entry {bad} out of range")));
        }
        let mul: Vec<Vec<u32>> = table
            .mul
            .iter()
            .map(|r| r.iter().map(|&v| v as u32).collect())
            .collect();
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mul[e][x] as usize == x && mul[x][e] as usize == x))
            .ok_or_else(|| Error::LampTable("no identity element".into()))?
            as u32;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let ab = mul[a][b] as usize;
                    let bc = mul[b][c] as usize;
                    if mul[ab][c] != mul[a][bc] {
                        return Err(Error::LampTable(format!(
                            "not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let inverses = (0..n)
            .map(|a| {
                (0..n as u32)
                    .find(|&b| mul[a][b as usize] == identity && mul[b as usize][a] == identity)
                    .ok_or_else(|| Error::LampTable(format!("element {a} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteLampGroup {
            table: mul,
            identity,
            inverses,
        })
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let table: LampTable = serde_json::from_str(&text)?;
        Self::from_table(&table)
    }

    /// `Z/q` with identity 0.
    pub fn cyclic(order: usize) -> Result<Self> {
        let mul = (0..order)
            .map(|a| (0..order).map(|b| (a + b) % order).collect())
            .collect();
        Self::from_table(&LampTable { order, mul })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }
}

impl LampGroup for FiniteLampGroup {
    type Value = u32;

    fn identity(&self) -> u32 {
        self.identity
    }

    fn multiply(&self, a: &u32, b: &u32) -> u32 {
        self.table[*a as usize][*b as usize]
    }

    fn inverse(&self, a: &u32) -> u32 {
        self.inverses[*a as usize]
    }

    fn cost(&self, a: &u32) -> u64 {
        u64::from(*a != self.identity)
    }

    fn generators(&self) -> Vec<u32> {
        (0..self.order() as u32)
            .filter(|&a| a != self.identity)
            .collect()
    }

    fn parse_value(&self, s: &str) -> Result<u32> {
        let v: u32 = s
            .trim()
            .parse()
            .map_err(|_| Error::parse(s, "expected a lamp-table index"))?;
        if v as usize >= self.order() {
            return Err(Error::parse(s, format!("index out of range 0..{}", self.order())));
        }
        Ok(v)
    }

    fn format_value(&self, a: &u32) -> String {
        a.to_string()
    }
}

/// `Z^d` as a lamp group with `S_A = {±e_i}`, so `|v|_{S_A} = |v|_1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntegerLamps {
    dim: usize,
}

impl IntegerLamps {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGroup("lamp lattice dimension must be positive".into()));
        }
        Ok(IntegerLamps { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl LampGroup for IntegerLamps {
    type Value = Vec<i64>;

    fn identity(&self) -> Vec<i64> {
        vec![0; self.dim]
    }

    fn multiply(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn inverse(&self, a: &Vec<i64>) -> Vec<i64> {
        a.iter().map(|x| -x).collect()
    }

    fn cost(&self, a: &Vec<i64>) -> u64 {
        a.iter().map(|x| x.unsigned_abs()).sum()
    }

    fn generators(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::with_capacity(2 * self.dim);
        for i in 0..self.dim {
            for s in [1, -1] {
                let mut v = vec![0; self.dim];
                v[i] = s;
                out.push(v);
            }
        }
        out
    }

    /// Colon-separated coordinates, e.g. `3` or `3:-2`.
    fn parse_value(&self, s: &str) -> Result<Vec<i64>> {
        let v = s
            .trim()
            .split(':')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::parse(s, "expected colon-separated integers"))?;
        if v.len() != self.dim {
            return Err(Error::parse(s, format!("expected {} coordinates", self.dim)));
        }
        Ok(v)
    }

    fn format_value(&self, a: &Vec<i64>) -> String {
        a.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(":")
    }
}
