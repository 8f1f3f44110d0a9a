//! `μ`-random walks on `A ≀ H`, the length cocycle and its defect.
//!
//! Every sample owns a ChaCha8 stream selected by `(seed, sample index)`, so
//! results do not depend on how samples are spread over threads.

mod batch;
mod measure;
mod walker;

pub use batch::{
    batch, BatchOutput, BatchSpec, CocycleRecord, DefectRecord, JobKind, TrackingRecord,
};
pub use measure::{sample_rng, GeometricTail, StepDistribution, MASS_TOLERANCE};
pub use walker::{
    default_checkpoints, run_trajectory, sample_defect, sample_tracking, Checkpoint,
    DefectSample, TrackingSample, Trajectory, Walker,
};
