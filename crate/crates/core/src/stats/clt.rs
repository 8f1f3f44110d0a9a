//! Drift, variance and normality diagnostics for `Q_n`.

use std::fmt;

use serde::Serialize;
use libm::erfc;

use crate::error::{Error, Result};

use super::moments::MomentAccumulator;

pub const MIN_DRIFT_SAMPLES: usize = 30;
pub const MIN_SIGMA_SAMPLES: usize = 100;
pub const MIN_NORMALITY_SAMPLES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HorizonDrift {
    pub n: u64,
    pub samples: usize,
    pub mean: f64,
    /// `mean / n`
    pub ratio: f64,
    /// `|mean / n - ℓ̂|`
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftEstimate {
    /// `mean(Q_{n_r}) / n_r` at the largest horizon.
    pub ell: f64,
    pub stderr: f64,
    pub horizons: Vec<HorizonDrift>,
}

/// `ℓ̂` from samples of `Q_n` grouped by horizon.
pub fn estimate_drift(groups: &[(u64, Vec<u64>)]) -> Result<DriftEstimate> {
    if groups.len() < 2 {
        return Err(Error::InsufficientSamples("need at least 2 horizons".into()));
    }
    let mut groups: Vec<&(u64, Vec<u64>)> = groups.iter().collect();
    groups.sort_by_key(|g| g.0);
    for (n, qs) in &groups {
        if qs.len() < MIN_DRIFT_SAMPLES {
            return Err(Error::InsufficientSamples(format!(
                "{} samples at horizon {n}, need {MIN_DRIFT_SAMPLES}",
                qs.len()
            )));
        }
        if *n == 0 {
            return Err(Error::InsufficientSamples("horizon 0 carries no drift information".into()));
        }
    }
    let acc = |qs: &[u64]| -> Result<MomentAccumulator> {
        let mut a = MomentAccumulator::new(2);
        for &q in qs {
            a.push(q as i64)?;
        }
        Ok(a)
    };
    let (n_r, last) = groups[groups.len() - 1];
    let top = acc(last)?;
    let ell = top.mean().unwrap_or(0.0) / *n_r as f64;
    let stderr = (top.variance().unwrap_or(0.0) / top.count() as f64).sqrt() / *n_r as f64;
    let horizons = groups
        .iter()
        .map(|(n, qs)| {
            let mean = acc(qs)?.mean().unwrap_or(0.0);
            let ratio = mean / *n as f64;
            Ok(HorizonDrift {
                n: *n,
                samples: qs.len(),
                mean,
                ratio,
                deviation: (ratio - ell).abs(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(DriftEstimate {
        ell,
        stderr,
        horizons,
    })
}

/// `σ̂ = sqrt(Var(Q_n) / n)`.
pub fn estimate_sigma(samples: &[u64], n: u64) -> Result<f64> {
    if samples.len() < MIN_SIGMA_SAMPLES {
        return Err(Error::InsufficientSamples(format!(
            "{} samples, need {MIN_SIGMA_SAMPLES}",
            samples.len()
        )));
    }
    if n == 0 {
        return Err(Error::Degenerate("horizon 0".into()));
    }
    let mut acc = MomentAccumulator::new(2);
    for &q in samples {
        acc.push(q as i64)?;
    }
    let var = acc.variance().unwrap_or(0.0);
    if var <= 0.0 {
        return Err(Error::Degenerate("zero sample variance".into()));
    }
    Ok((var / n as f64).sqrt())
}

/// `(Q_n - ℓ̂ n) / (σ̂ √n)`.
pub fn standardize(samples: &[u64], n: u64, ell: f64, sigma: f64) -> Vec<f64> {
    let scale = sigma * (n as f64).sqrt();
    samples
        .iter()
        .map(|&q| (q as f64 - ell * n as f64) / scale)
        .collect()
}

/// `Φ(x) = erfc(-x / √2) / 2`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Asymptotic Kolmogorov tail `P(K > λ)` with the Stephens small-sample
/// correction `λ = (√n + 0.12 + 0.11/√n) D`.
pub fn kolmogorov_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut p = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        p += if k % 2 == 1 { 2.0 * term } else { -2.0 * term };
        if term < 1e-16 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalityReport {
    pub samples: usize,
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub ks_statistic: f64,
    pub ks_p_value: f64,
    pub ad_statistic: f64,
}

impl NormalityReport {
    /// KS rejection at level `alpha`.
    pub fn rejects(&self, alpha: f64) -> bool {
        self.ks_p_value < alpha
    }
}

/// Mean, standard deviation, skewness and excess kurtosis (population moments, two passes).
pub fn shape_moments(z: &[f64]) -> (f64, f64, f64, f64) {
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in z {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    (mean, m2.sqrt(), m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
}

/// One-sample KS and Anderson–Darling against the standard normal.
pub fn normality_test(z: &[f64]) -> Result<NormalityReport> {
    if z.len() < MIN_NORMALITY_SAMPLES {
        return Err(Error::InsufficientSamples(format!(
            "{} samples, need {MIN_NORMALITY_SAMPLES}",
            z.len()
        )));
    }
    if z.iter().any(|x| !x.is_finite()) {
        return Err(Error::Degenerate("non-finite sample".into()));
    }
    let (mean, sd, skewness, excess_kurtosis) = shape_moments(z);
    if !(sd > 0.0) {
        return Err(Error::Degenerate("constant sample".into()));
    }
    let mut s = z.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    let nf = n as f64;
    let mut d = 0.0f64;
    let mut ad = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let f = normal_cdf(x);
        d = d.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
        let lower = normal_cdf(x).max(f64::MIN_POSITIVE).ln();
        let upper = normal_cdf(-s[n - 1 - i]).max(f64::MIN_POSITIVE).ln();
        ad += (2 * i + 1) as f64 * (lower + upper);
    }
    Ok(NormalityReport {
        samples: n,
        mean,
        sd,
        skewness,
        excess_kurtosis,
        ks_statistic: d,
        ks_p_value: kolmogorov_p_value(d, n),
        ad_statistic: -nf - ad / nf,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CltReport {
    pub n: u64,
    pub ell: f64,
    pub sigma: f64,
    #[serde(flatten)]
    pub normality: NormalityReport,
    #[serde(flatten)]
    pub lattice: Option<LatticeKs>,
}

impl CltReport {
    /// KS rejection at level `alpha`, continuity-corrected when the samples lie on a lattice.
    pub fn rejects(&self, alpha: f64) -> bool {
        match &self.lattice {
            Some(l) => l.ks_lattice_p_value < alpha,
            None => self.normality.rejects(alpha),
        }
    }
}

/// KS distance between integer samples on a lattice of span `h` and the
/// normal law, with the normal CDF read at the half-span points `k ± h/2`.
///
/// The raw statistic of a lattice variable against a continuous law is at
/// least half the largest atom, which stays comparable to the critical value
/// at the sample sizes used here.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeKs {
    pub lattice_span: u64,
    pub ks_lattice_statistic: f64,
    pub ks_lattice_p_value: f64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Continuity-corrected KS of `(Q - ℓn)/(σ√n)`; `None` for constant samples.
pub fn lattice_ks(samples: &[u64], n: u64, ell: f64, sigma: f64) -> Option<LatticeKs> {
    let lo = *samples.iter().min()?;
    let span = samples.iter().fold(0, |g, &q| gcd(g, q - lo));
    if span == 0 {
        return None;
    }
    let mut s = samples.to_vec();
    s.sort_unstable();
    let total = s.len() as f64;
    let scale = sigma * (n as f64).sqrt();
    let z = |x: f64| normal_cdf((x - ell * n as f64) / scale);
    let half = span as f64 / 2.0;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < s.len() {
        let k = s[i];
        let j = i + s[i..].partition_point(|&q| q == k);
        let before = i as f64 / total;
        let after = j as f64 / total;
        d = d
            .max((before - z(k as f64 - half)).abs())
            .max((after - z(k as f64 + half)).abs());
        i = j;
    }
    Some(LatticeKs {
        lattice_span: span,
        ks_lattice_statistic: d,
        ks_lattice_p_value: kolmogorov_p_value(d, s.len()),
    })
}

/// Standardises `Q_n` samples with externally estimated `(ℓ̂, σ̂)` and tests them.
pub fn clt_report(samples: &[u64], n: u64, ell: f64, sigma: f64) -> Result<CltReport> {
    if !(sigma > 0.0) {
        return Err(Error::Degenerate("sigma must be positive to standardise".into()));
    }
    Ok(CltReport {
        n,
        ell,
        sigma,
        normality: normality_test(&standardize(samples, n, ell, sigma))?,
        lattice: lattice_ks(samples, n, ell, sigma),
    })
}

impl fmt::Display for CltReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.normality;
        let mut rows: Vec<(&str, String)> = vec![
            ("n", self.n.to_string()),
            ("samples", r.samples.to_string()),
            ("ell", format!("{:.6}", self.ell)),
            ("sigma", format!("{:.6}", self.sigma)),
            ("mean", format!("{:.6}", r.mean)),
            ("sd", format!("{:.6}", r.sd)),
            ("skewness", format!("{:.6}", r.skewness)),
            ("excess_kurtosis", format!("{:.6}", r.excess_kurtosis)),
            ("ks", format!("{:.6} (p = {:.4})", r.ks_statistic, r.ks_p_value)),
            ("anderson_darling", format!("{:.6}", r.ad_statistic)),
        ];
        if let Some(l) = &self.lattice {
            rows.push(("lattice_span", l.lattice_span.to_string()));
            rows.push((
                "ks_lattice",
                format!("{:.6} (p = {:.4})", l.ks_lattice_statistic, l.ks_lattice_p_value),
            ));
        }
        for (k, v) in rows {
            writeln!(f, "{k:<18}{v}")?;
        }
        Ok(())
    }
}
