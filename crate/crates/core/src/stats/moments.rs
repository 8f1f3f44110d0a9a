use serde::Serialize;

use crate::error::{Error, Result};

/// Exact power sums `Σ x^k`, `k = 1..=max_power`, of integer observables.
///
/// Sums are held in `i128` with checked arithmetic, so merging is exactly
/// associative and commutative and overflow is reported instead of wrapping.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MomentAccumulator {
    max_power: u32,
    count: u64,
    sums: Vec<i128>,
}

impl MomentAccumulator {
    pub fn new(max_power: u32) -> Self {
        assert!(max_power >= 1, "max_power must be at least 1");
        MomentAccumulator {
            max_power,
            count: 0,
            sums: vec![0; max_power as usize],
        }
    }

    pub fn push(&mut self, x: i64) -> Result<()> {
        let x = x as i128;
        let mut pow: i128 = 1;
        for k in 1..=self.max_power {
            pow = pow
                .checked_mul(x)
                .ok_or(Error::MomentOverflow { power: k })?;
            let s = &mut self.sums[k as usize - 1];
            *s = s.checked_add(pow).ok_or(Error::MomentOverflow { power: k })?;
        }
        self.count += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &MomentAccumulator) -> Result<()> {
        assert_eq!(self.max_power, other.max_power, "merging accumulators of different orders");
        for (k, (s, o)) in self.sums.iter_mut().zip(&other.sums).enumerate() {
            *s = s.checked_add(*o).ok_or(Error::MomentOverflow {
                power: k as u32 + 1,
            })?;
        }
        self.count += other.count;
        Ok(())
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn max_power(&self) -> u32 {
        self.max_power
    }

    /// `Σ x^k`.
    pub fn sum(&self, k: u32) -> i128 {
        self.sums[k as usize - 1]
    }

    /// `E x^k`; `None` when empty.
    pub fn raw_moment(&self, k: u32) -> Option<f64> {
        (self.count > 0).then(|| self.sum(k) as f64 / self.count as f64)
    }

    pub fn mean(&self) -> Option<f64> {
        self.raw_moment(1)
    }

    /// Unbiased sample variance from the exact numerator `n Σx² - (Σx)²`.
    pub fn variance(&self) -> Option<f64> {
        if self.count < 2 || self.max_power < 2 {
            return None;
        }
        let n = self.count as i128;
        let num = n.checked_mul(self.sum(2))?.checked_sub(self.sum(1).checked_mul(self.sum(1))?)?;
        Some(num as f64 / (n * (n - 1)) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_example() {
        let mut acc = MomentAccumulator::new(4);
        for x in [1, 2, 3, 4] {
            acc.push(x).unwrap();
        }
        assert_eq!(acc.sum(1), 10);
        assert_eq!(acc.sum(2), 30);
        assert_eq!(acc.sum(4), 354);
        assert_eq!(acc.mean(), Some(2.5));
        assert!((acc.variance().unwrap() - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(MomentAccumulator::new(2).mean(), None);
    }

    #[test]
    fn overflow_is_reported() {
        let mut acc = MomentAccumulator::new(8);
        assert!(matches!(acc.push(i64::MAX), Err(Error::MomentOverflow { power: 3 })));
    }

    proptest! {
        #[test]
        fn merge_matches_concatenation(xs in prop::collection::vec(-1000i64..1000, 0..60), cut in 0usize..60) {
            let cut = cut.min(xs.len());
            let mut whole = MomentAccumulator::new(4);
            xs.iter().for_each(|&x| whole.push(x).unwrap());
            let mut left = MomentAccumulator::new(4);
            let mut right = MomentAccumulator::new(4);
            xs[..cut].iter().for_each(|&x| left.push(x).unwrap());
            xs[cut..].iter().for_each(|&x| right.push(x).unwrap());
            let mut lr = left.clone();
            lr.merge(&right).unwrap();
            let mut rl = right;
            rl.merge(&left).unwrap();
            prop_assert_eq!(&lr, &whole);
            prop_assert_eq!(&rl, &whole);
        }
    }
}
