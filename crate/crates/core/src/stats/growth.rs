//! Defect moments across a grid and their growth fits.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;

use crate::error::Result;

use super::moments::MomentAccumulator;

/// Ordinary least squares `y ≈ slope x + intercept`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| y - slope * x - intercept)
        .collect();
    Some(LinearFit {
        slope,
        intercept,
        residuals,
    })
}

/// Exponent of `y ~ c x^e` by least squares on logs; needs 3 positive points.
pub fn power_law_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    if xs.len() < 3 || xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    least_squares(&lx, &ly)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthPoint {
    pub m: u64,
    pub n: u64,
    pub samples: u64,
    /// `E |Ψ_{m,n}|^p`
    pub moment: f64,
    /// Log–log residual, when the exponent is defined.
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub p: u32,
    pub points: Vec<GrowthPoint>,
    /// Slope of `log moment` against `log(m + n)`; needs 3 points with positive moment.
    pub exponent: Option<f64>,
    /// Least-squares `c` in `moment ≈ c log(m + n)^{2p}`.
    pub coefficient: Option<f64>,
}

/// Groups `(m, n, Ψ)` records by grid point and fits each requested power.
///
/// The result does not depend on record order.
pub fn defect_moment_table(
    records: impl IntoIterator<Item = (u64, u64, i64)>,
    powers: &[u32],
) -> Result<Vec<GrowthFit>> {
    let max_power = powers.iter().copied().max().unwrap_or(1).max(1);
    let mut grid: BTreeMap<(u64, u64), MomentAccumulator> = BTreeMap::new();
    for (m, n, psi) in records {
        grid.entry((m, n))
            .or_insert_with(|| MomentAccumulator::new(max_power))
            .push(psi.abs())?;
    }
    Ok(powers
        .iter()
        .map(|&p| {
            let mut points: Vec<GrowthPoint> = grid
                .iter()
                .map(|(&(m, n), acc)| GrowthPoint {
                    m,
                    n,
                    samples: acc.count(),
                    moment: acc.raw_moment(p).unwrap_or(0.0),
                    residual: None,
                })
                .collect();
            let xs: Vec<f64> = points.iter().map(|g| (g.m + g.n) as f64).collect();
            let ys: Vec<f64> = points.iter().map(|g| g.moment).collect();
            let fit = power_law_fit(&xs, &ys);
            if let Some(f) = &fit {
                for (g, r) in points.iter_mut().zip(&f.residuals) {
                    g.residual = Some(*r);
                }
            }
            let basis: Vec<f64> = xs
                .iter()
                .map(|x| if *x > 1.0 { x.ln().powi(2 * p as i32) } else { 0.0 })
                .collect();
            let denom: f64 = basis.iter().map(|b| b * b).sum();
            let coefficient = (denom > 0.0)
                .then(|| basis.iter().zip(&ys).map(|(b, y)| b * y).sum::<f64>() / denom);
            GrowthFit {
                p,
                points,
                exponent: fit.map(|f| f.slope),
                coefficient,
            }
        })
        .collect())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), |x| format!("{x:.9e}"))
}

/// Columns `n,p,moment,fit_exponent,fit_coeff,residual`.
pub fn write_growth_csv<W: Write>(fits: &[GrowthFit], out: &mut W) -> io::Result<()> {
    writeln!(out, "n,p,moment,fit_exponent,fit_coeff,residual")?;
    for f in fits {
        for g in &f.points {
            writeln!(
                out,
                "{},{},{:.9e},{},{},{}",
                g.n,
                f.p,
                g.moment,
                opt(f.exponent),
                opt(f.coefficient),
                opt(g.residual)
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let xs = [2.0, 4.0, 8.0, 16.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(0.5)).collect();
        let f = power_law_fit(&xs, &ys).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(power_law_fit(&xs[..2], &ys[..2]).is_none());
    }

    #[test]
    fn zero_defects() {
        let recs = (0..3).flat_map(|k| (0..10).map(move |_| (1u64 << k, 1u64 << k, 0i64)));
        let fits = defect_moment_table(recs, &[1, 2]).unwrap();
        for f in &fits {
            assert!(f.points.iter().all(|g| g.moment == 0.0));
            assert_eq!(f.exponent, None);
            assert_eq!(f.coefficient, Some(0.0));
        }
    }

    #[test]
    fn moments_and_order_invariance() {
        let mut recs = vec![(4, 0, 0), (4, 4, 1), (4, 4, 3), (8, 8, 2), (16, 16, 4), (8, 8, 2), (16, 16, 2)];
        let a = defect_moment_table(recs.clone(), &[2]).unwrap();
        recs.reverse();
        let b = defect_moment_table(recs, &[2]).unwrap();
        assert_eq!(a, b);
        let pts = &a[0].points;
        assert_eq!(pts[0].moment, 0.0);
        assert_eq!(pts[1].moment, 5.0);
        assert_eq!(pts[2].moment, 4.0);
        assert_eq!(pts[3].moment, 10.0);
        // the zero moment at (4, 0) blocks the log fit
        assert_eq!(a[0].exponent, None);
    }

    #[test]
    fn csv_layout() {
        let fits = defect_moment_table(vec![(2, 2, 1), (4, 4, 2), (8, 8, 3)], &[1]).unwrap();
        let mut buf = Vec::new();
        write_growth_csv(&fits, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,p,moment,fit_exponent,fit_coeff,residual");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("2,1,1.000000000e0,"));
    }
}
