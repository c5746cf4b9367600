//! Sweeps and experiment bundles: Hölder and Calderón–Zygmund ε-sweeps on
//! smoothed cones, energy decay ladders and the dyadic iteration.

mod config;
mod decay;
mod fit;
mod holder;
mod iterate;
mod sweep;

pub use config::{
    EpsilonGrid, ExperimentKind, Spacing, SweepConfig, Tolerances, DEFAULT_HOLDER_DEPTH,
};
pub use decay::{
    circle_mode, dyadic_radii, run_decay_config, run_decay_experiment, DecayReport, DecayRow,
    DecaySubject,
};
pub use fit::{final_decade, fit_power_law, PowerLawFit};
pub use holder::{holder_points, holder_seminorm, holder_seminorm_with};
pub use iterate::{run_iterate_experiment, IterateReport, IterateRow, DEFAULT_THRESHOLD};
pub use sweep::{
    measure_cz, run_cz_sweep, run_holder_sweep, CzMeasurement, Regime, RuleOutcome, SweepReport,
    SweepRow,
};

use crate::error::Result;

/// Result of any configured experiment.
#[derive(Debug, Clone)]
pub enum ExperimentReport {
    Sweep(SweepReport),
    Decay(Vec<DecayReport>),
    Iterate(IterateReport),
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        match self {
            ExperimentReport::Sweep(r) => r.passed,
            ExperimentReport::Decay(rs) => rs.iter().all(|r| r.passed),
            ExperimentReport::Iterate(r) => r.passed,
        }
    }
}

/// Validates `cfg` and runs the experiment it names.
pub fn run_experiment(cfg: &SweepConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    Ok(match cfg.experiment {
        ExperimentKind::Holder => ExperimentReport::Sweep(run_holder_sweep(cfg)?),
        ExperimentKind::Cz => ExperimentReport::Sweep(run_cz_sweep(cfg)?),
        ExperimentKind::Decay => ExperimentReport::Decay(run_decay_config(cfg)?),
        ExperimentKind::Iterate => ExperimentReport::Iterate(run_iterate_experiment(cfg)?),
    })
}
