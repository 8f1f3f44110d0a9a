//! Estimators and tests for walk samples.

pub mod clt;
pub mod growth;
pub mod moments;
pub mod tracking;

pub use clt::{
    clt_report, estimate_drift, estimate_sigma, kolmogorov_p_value, normal_cdf, normality_test,
    shape_moments, standardize, CltReport, DriftEstimate, HorizonDrift, NormalityReport,
};
pub use growth::{
    defect_moment_table, least_squares, power_law_fit, write_growth_csv, GrowthFit, GrowthPoint,
    LinearFit,
};
pub use moments::MomentAccumulator;
pub use tracking::{tracking_stats, ProgressSpec, TrackingStats};

/// Median of a non-empty sample.
pub fn median(values: &[u64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable();
    let n = v.len();
    assert!(n > 0, "median of an empty sample");
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
    }
}
