//! Least-squares power laws in log10–log10 coordinates.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// Exponent `b` in `y ≈ a·x^b`.
    pub slope: f64,
    /// `log10 a`.
    pub intercept: f64,
    /// 95% confidence half-width of the slope (needs three or more points).
    pub half_width: Option<f64>,
    /// Largest absolute residual in log10 units.
    pub max_residual: f64,
    pub points: usize,
}

/// Fits `log10 y = intercept + slope · log10 x`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    if xs.len() != ys.len() {
        return Err(Error::Structure(format!(
            "fit needs paired samples, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::Degenerate(
            "a power-law fit needs at least two points".into(),
        ));
    }
    for (&x, &y) in xs.iter().zip(ys) {
        if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Degenerate(format!(
                "power-law fit needs positive finite samples, got ({x}, {y})"
            )));
        }
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.log10()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.log10()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all abscissae coincide".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let half_width = (lx.len() > 2).then(|| {
        let dof = n - 2.0;
        let s2 = residuals.iter().map(|r| r * r).sum::<f64>() / dof;
        let t = StudentsT::new(0.0, 1.0, dof).expect("positive degrees of freedom");
        t.inverse_cdf(0.975) * (s2 / sxx).sqrt()
    });
    Ok(PowerLawFit {
        slope,
        intercept,
        half_width,
        max_residual,
        points: lx.len(),
    })
}

/// Indices of the samples with `ε ≤ 10·min ε`.
pub fn final_decade(eps: &[f64]) -> Vec<usize> {
    let min = eps.iter().copied().fold(f64::INFINITY, f64::min);
    let cut = 10.0 * min * (1.0 + 1e-9);
    (0..eps.len()).filter(|&i| eps[i] <= cut).collect()
}
