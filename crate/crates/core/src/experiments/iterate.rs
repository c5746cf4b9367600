//! Dyadic energy iteration driven by the cone contraction.

use serde::{Deserialize, Serialize};

use super::config::{ExperimentKind, SweepConfig};
use super::decay::circle_mode;
use crate::error::{Error, Result};
use crate::spectral::{contraction_check, iterate_dyadic, predicted_steps};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterateRow {
    pub step: usize,
    pub radius: f64,
    pub energy: f64,
    pub envelope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterateReport {
    pub delta0: f64,
    pub p: f64,
    pub n: f64,
    pub r0: f64,
    pub e0: f64,
    pub forcing: f64,
    pub threshold: f64,
    /// First step after which the energy stays below the threshold.
    pub first_below: Option<usize>,
    /// Step count from the closed-form envelope.
    pub predicted_steps: usize,
    pub passed: bool,
    #[serde(skip)]
    pub rows: Vec<IterateRow>,
}

pub const DEFAULT_THRESHOLD: f64 = 1e-9;

/// Runs the recursion with `δ₀` measured on the 2-cone over the circle of
/// circumference `2πβ` (mode frequency `k`) and `R₀ = r_max`.
pub fn run_iterate_experiment(cfg: &SweepConfig) -> Result<IterateReport> {
    if cfg.experiment != ExperimentKind::Iterate {
        return Err(Error::config("experiment", "expected `iterate`"));
    }
    cfg.validate()?;
    let p = cfg.p.expect("validated");
    let n = 2.0;
    let delta0 = contraction_check(&circle_mode(cfg.beta, cfg.k)?)?.delta0;
    let e0 = cfg.e0.unwrap_or(1.0);
    let forcing = cfg.forcing.unwrap_or(1.0);
    let threshold = cfg.threshold.unwrap_or(DEFAULT_THRESHOLD);
    let r0 = cfg.r_max;
    let predicted = predicted_steps(e0, delta0, forcing, p, n, r0, threshold)?;
    let kmax = cfg.kmax.unwrap_or(predicted + 16);
    let trace = iterate_dyadic(e0, delta0, forcing, p, n, r0, kmax)?;
    let rows = (0..=kmax)
        .map(|k| IterateRow {
            step: k,
            radius: trace.radii[k],
            energy: trace.energies[k],
            envelope: trace.envelope(k),
        })
        .collect();
    let first_below = trace.first_below(threshold);
    Ok(IterateReport {
        delta0,
        p,
        n,
        r0,
        e0,
        forcing,
        threshold,
        first_below,
        predicted_steps: predicted,
        passed: first_below.is_some_and(|k| k <= predicted),
        rows,
    })
}
