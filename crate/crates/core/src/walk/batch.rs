//! Parallel Monte Carlo over independent samples.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::BaseGroup;
use crate::error::{Error, Result};
use crate::lamp::LampGroup;
use crate::stats::tracking::ProgressSpec;
use crate::wreath::Wreath;

use super::measure::StepDistribution;
use super::walker::{cocycle_checkpoints, sample_defect, sample_tracking};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JobKind {
    /// `Q_n` and `d_H(id, Z̄_n)` at each horizon of one trajectory per sample.
    Cocycle { horizons: Vec<u64> },
    /// One fresh trajectory per sample and grid pair.
    Defect { pairs: Vec<(u64, u64)> },
    Tracking {
        horizons: Vec<u64>,
        #[serde(default)]
        progress: Option<ProgressSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchSpec {
    #[serde(flatten)]
    pub kind: JobKind,
    pub samples: u64,
    pub seed: u64,
}

impl BatchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::config("samples", "must be positive"));
        }
        if self.samples > u32::MAX as u64 {
            return Err(Error::config("samples", "must fit in 32 bits"));
        }
        let empty = match &self.kind {
            JobKind::Cocycle { horizons } | JobKind::Tracking { horizons, .. } => horizons.is_empty(),
            JobKind::Defect { pairs } => pairs.is_empty(),
        };
        if empty {
            return Err(Error::config("grid", "must not be empty"));
        }
        if let JobKind::Tracking {
            progress: Some(p), ..
        } = &self.kind
        {
            p.validate()?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CocycleRecord {
    pub sample: u64,
    pub n: u64,
    pub q: u64,
    pub base_depth: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DefectRecord {
    pub sample: u64,
    pub m: u64,
    pub n: u64,
    pub q_m: u64,
    pub shifted: u64,
    pub q_mn: u64,
    pub psi: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrackingRecord {
    pub sample: u64,
    pub n: u64,
    pub max_deviation: u64,
    pub endpoint_depth: u64,
    pub violations: u64,
    pub pairs: u64,
}

/// Records in sample order, then grid order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "records", rename_all = "snake_case")]
pub enum BatchOutput {
    Cocycle(Vec<CocycleRecord>),
    Defect(Vec<DefectRecord>),
    Tracking(Vec<TrackingRecord>),
}

impl BatchOutput {
    pub fn len(&self) -> usize {
        match self {
            BatchOutput::Cocycle(r) => r.len(),
            BatchOutput::Defect(r) => r.len(),
            BatchOutput::Tracking(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Header row then one row per record.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        match self {
            BatchOutput::Cocycle(rs) => {
                writeln!(out, "sample,n,q,base_depth")?;
                for r in rs {
                    writeln!(out, "{},{},{},{}", r.sample, r.n, r.q, r.base_depth)?;
                }
            }
            BatchOutput::Defect(rs) => {
                writeln!(out, "sample,m,n,q_m,shifted,q_mn,psi")?;
                for r in rs {
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        r.sample, r.m, r.n, r.q_m, r.shifted, r.q_mn, r.psi
                    )?;
                }
            }
            BatchOutput::Tracking(rs) => {
                writeln!(out, "sample,n,max_deviation,endpoint_depth,violations,pairs")?;
                for r in rs {
                    writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        r.sample, r.n, r.max_deviation, r.endpoint_depth, r.violations, r.pairs
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// Stream of sample `s` at defect grid point `g`.
fn defect_stream(g: usize, s: u64) -> u64 {
    ((g as u64) << 32) | s
}

/// Runs `spec` on a pool of `threads` workers; the output does not depend on `threads`.
pub fn batch<L: LampGroup, B: BaseGroup>(
    wreath: &Wreath<L, B>,
    mu: &StepDistribution<L, B>,
    spec: &BatchSpec,
    threads: usize,
) -> Result<BatchOutput> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::config("threads", e.to_string()))?;
    let seed = spec.seed;
    pool.install(|| match &spec.kind {
        JobKind::Cocycle { horizons } => {
            let per: Vec<Vec<CocycleRecord>> = (0..spec.samples)
                .into_par_iter()
                .map(|s| {
                    Ok(cocycle_checkpoints(wreath, mu, seed, s, horizons)?
                        .into_iter()
                        .map(|c| CocycleRecord {
                            sample: s,
                            n: c.k,
                            q: c.q,
                            base_depth: c.base_depth,
                        })
                        .collect())
                })
                .collect::<Result<_>>()?;
            Ok(BatchOutput::Cocycle(per.into_iter().flatten().collect()))
        }
        JobKind::Defect { pairs } => {
            let per: Vec<Vec<DefectRecord>> = (0..spec.samples)
                .into_par_iter()
                .map(|s| {
                    pairs
                        .iter()
                        .enumerate()
                        .map(|(g, &(m, n))| {
                            let d = sample_defect(wreath, mu, m, n, seed, defect_stream(g, s))?;
                            Ok(DefectRecord {
                                sample: s,
                                m,
                                n,
                                q_m: d.q_m,
                                shifted: d.shifted,
                                q_mn: d.q_mn,
                                psi: d.psi,
                            })
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            Ok(BatchOutput::Defect(per.into_iter().flatten().collect()))
        }
        JobKind::Tracking { horizons, progress } => {
            let per: Vec<Vec<TrackingRecord>> = (0..spec.samples)
                .into_par_iter()
                .map(|s| {
                    Ok(sample_tracking(wreath, mu, horizons, *progress, seed, s)?
                        .into_iter()
                        .map(|t| TrackingRecord {
                            sample: s,
                            n: t.n,
                            max_deviation: t.stats.max_deviation,
                            endpoint_depth: t.stats.endpoint_depth,
                            violations: t.stats.violations,
                            pairs: t.stats.pairs,
                        })
                        .collect())
                })
                .collect::<Result<_>>()?;
            Ok(BatchOutput::Tracking(per.into_iter().flatten().collect()))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::FreeGroup;
    use crate::lamp::FiniteLampGroup;
    use crate::walk::{run_trajectory, sample_defect};

    fn setup() -> (
        Wreath<FiniteLampGroup, FreeGroup>,
        StepDistribution<FiniteLampGroup, FreeGroup>,
    ) {
        let g = Wreath::new(FiniteLampGroup::cyclic(2).unwrap(), FreeGroup::new(2).unwrap());
        let mu = StepDistribution::uniform_generators(&g).unwrap();
        (g, mu)
    }

    fn csv(out: &BatchOutput) -> Vec<u8> {
        let mut buf = Vec::new();
        out.write_csv(&mut buf).unwrap();
        buf
    }

    #[test]
    fn single_sample_matches_direct_calls() {
        let (g, mu) = setup();
        let spec = BatchSpec {
            kind: JobKind::Cocycle {
                horizons: vec![10, 20],
            },
            samples: 1,
            seed: 4,
        };
        let BatchOutput::Cocycle(rs) = batch(&g, &mu, &spec, 1).unwrap() else {
            panic!()
        };
        let t = run_trajectory(&g, &mu, 20, 4, 0, &[10, 20]).unwrap();
        assert_eq!(rs[0].q, t.checkpoints[0].q);
        assert_eq!(rs[1].q, t.checkpoints[1].q);

        let spec = BatchSpec {
            kind: JobKind::Defect {
                pairs: vec![(8, 8), (16, 4)],
            },
            samples: 1,
            seed: 4,
        };
        let BatchOutput::Defect(rs) = batch(&g, &mu, &spec, 1).unwrap() else {
            panic!()
        };
        let d = sample_defect(&g, &mu, 16, 4, 4, 1 << 32).unwrap();
        assert_eq!(rs[1].psi, d.psi);
        assert_eq!(rs[1].q_mn, d.q_mn);
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let (g, mu) = setup();
        for kind in [
            JobKind::Cocycle {
                horizons: vec![32, 64],
            },
            JobKind::Defect {
                pairs: vec![(16, 16), (32, 32)],
            },
            JobKind::Tracking {
                horizons: vec![32, 64],
                progress: Some(ProgressSpec {
                    k0: 10.0,
                    window: 8,
                    stride: 4,
                }),
            },
        ] {
            let spec = BatchSpec {
                kind,
                samples: 40,
                seed: 99,
            };
            let one = csv(&batch(&g, &mu, &spec, 1).unwrap());
            let four = csv(&batch(&g, &mu, &spec, 4).unwrap());
            assert_eq!(one, four);
        }
    }

    #[test]
    fn validation_names_key() {
        let spec = BatchSpec {
            kind: JobKind::Cocycle { horizons: vec![1] },
            samples: 0,
            seed: 0,
        };
        match spec.validate() {
            Err(Error::Config { key, .. }) => assert_eq!(key, "samples"),
            other => panic!("{other:?}"),
        }
    }
}
