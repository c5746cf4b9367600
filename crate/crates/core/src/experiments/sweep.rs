//! ε-sweeps on the smoothed cone family.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentKind, SweepConfig};
use super::fit::{final_decade, fit_power_law, PowerLawFit};
use super::holder::holder_seminorm_with;
use crate::error::{Error, Result};
use crate::revolution::{lp_estimate, solve_mode, Field, LpOptions, ModeSolution, ProfileFunction};

/// Allowed relative deviation of a fitted slope from its prediction.
pub const SLOPE_RTOL: f64 = 0.15;
/// Largest log10 residual accepted in a slope fit.
pub const MAX_FIT_RESIDUAL: f64 = 0.1;
/// Relative slack of the monotone blow-up rule.
pub const MONOTONE_SLACK: f64 = 0.02;
/// Largest relative spread `(max − min)/min` of a bounded quantity.
pub const BOUNDED_SPREAD: f64 = 0.1;
/// Values below this count as zero in the flat controls.
pub const NULL_LEVEL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    /// Meridian Hölder seminorm of `|∇u|` divided by `‖u‖_{W^{1,2}}`.
    pub holder_seminorm: Option<f64>,
    /// `‖∇²u‖_p` divided by the normalizer.
    pub hessian_lp: Option<f64>,
    /// `‖Δu‖_p + ‖∇u‖_p`.
    pub normalizer: Option<f64>,
    pub w12_norm: f64,
}

/// What the cone scaling predicts for the measured quantity as `ε → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Power-law growth with a predicted negative slope.
    BlowUp,
    /// Exponent exactly at the threshold; slope zero.
    Borderline,
    /// Converges to a finite limit.
    Bounded,
    /// Identically zero (flat controls).
    Null,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleOutcome {
    pub rule: String,
    pub passed: bool,
    pub detail: String,
}

impl RuleOutcome {
    fn new(rule: &str, passed: bool, detail: String) -> Self {
        Self {
            rule: rule.into(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub experiment: ExperimentKind,
    /// Column of [`SweepRow`] being fitted.
    pub measured: &'static str,
    pub alpha: f64,
    pub regime: Regime,
    pub predicted_slope: Option<f64>,
    /// Fit over the final decade of ε.
    pub fit: Option<PowerLawFit>,
    pub rules: Vec<RuleOutcome>,
    pub passed: bool,
    #[serde(skip)]
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn measured_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| self.measured_of(r)).collect()
    }

    fn measured_of(&self, row: &SweepRow) -> f64 {
        match self.experiment {
            ExperimentKind::Cz => row.hessian_lp.unwrap_or(f64::NAN),
            _ => row.holder_seminorm.unwrap_or(f64::NAN),
        }
    }
}

/// Normalized Hessian measurement for one solved mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CzMeasurement {
    pub hessian: f64,
    pub gradient: f64,
    pub laplacian: f64,
}

impl CzMeasurement {
    pub fn normalizer(&self) -> f64 {
        self.laplacian + self.gradient
    }

    /// `‖∇²u‖_p / (‖Δu‖_p + ‖∇u‖_p)`
    pub fn ratio(&self) -> f64 {
        self.hessian / self.normalizer()
    }
}

/// `L^p` norms of `∇²u`, `∇u` and `Δu` over `B_R`.
pub fn measure_cz(
    sol: &ModeSolution<f64>,
    p: f64,
    radius: f64,
    opts: &LpOptions<f64>,
) -> Result<CzMeasurement> {
    let norm = |field| lp_estimate(sol, field, p, radius, opts).map(|e| e.norm);
    Ok(CzMeasurement {
        hessian: norm(Field::Hessian)?,
        gradient: norm(Field::Gradient)?,
        laplacian: norm(Field::LaplacianResidual)?,
    })
}

fn at_eps(err: Error, eps: f64) -> Error {
    match err {
        Error::Solver(m) => Error::Solver(format!("at eps = {eps}: {m}")),
        Error::Divergent { field, p, detail } => Error::Divergent {
            field,
            p,
            detail: format!("at eps = {eps}: {detail}"),
        },
        other => other,
    }
}

fn measure_row(cfg: &SweepConfig, eps: f64) -> Result<SweepRow> {
    let profile = ProfileFunction::smoothed(cfg.beta, eps, cfg.r_max)?;
    let sol = solve_mode(&profile, cfg.k, cfg.tolerances.ode)?;
    let opts = LpOptions {
        rel_tol: cfg.tolerances.quadrature,
        ..LpOptions::default()
    };
    let two = |field| lp_estimate(&sol, field, 2.0, cfg.r_max, &opts).map(|e| e.norm);
    let (value, gradient) = (two(Field::Value)?, two(Field::Gradient)?);
    let w12 = (value * value + gradient * gradient).sqrt();
    let mut row = SweepRow {
        eps,
        holder_seminorm: None,
        hessian_lp: None,
        normalizer: None,
        w12_norm: w12,
    };
    if let Some(gamma) = cfg
        .gamma
        .filter(|_| cfg.experiment == ExperimentKind::Holder)
    {
        row.holder_seminorm = Some(holder_seminorm_with(&sol, gamma, cfg.holder_depth())? / w12);
    }
    if let Some(p) = cfg.p.filter(|_| cfg.experiment == ExperimentKind::Cz) {
        let m = measure_cz(&sol, p, cfg.r_max, &opts)?;
        row.hessian_lp = Some(m.ratio());
        row.normalizer = Some(m.normalizer());
    }
    Ok(row)
}

/// Measures every ε of the grid in parallel; rows keep the grid order.
fn measure_rows(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.epsilon_values()
        .par_iter()
        .map(|&eps| measure_row(cfg, eps).map_err(|e| at_eps(e, eps)))
        .collect()
}

fn holder_regime(cfg: &SweepConfig) -> (Regime, Option<f64>) {
    let alpha = cfg.alpha();
    let gamma = cfg.gamma.unwrap_or(f64::NAN);
    if cfg.beta == 1.0 && cfg.k == 1 {
        (Regime::Null, None)
    } else if (gamma - (alpha - 1.0)).abs() <= 1e-12 {
        (Regime::Borderline, Some(0.0))
    } else if gamma > alpha - 1.0 {
        (Regime::BlowUp, Some(-(gamma - (alpha - 1.0))))
    } else {
        (Regime::Bounded, None)
    }
}

fn cz_regime(cfg: &SweepConfig) -> (Regime, Option<f64>) {
    let alpha = cfg.alpha();
    let p = cfg.p.unwrap_or(f64::NAN);
    if cfg.beta == 1.0 {
        (Regime::Null, None)
    } else {
        (Regime::BlowUp, Some(alpha - 2.0 + 2.0 / p))
    }
}

/// Hölder sweep: seminorm of `|∇u|` normalized by `‖u‖_{W^{1,2}}` per ε.
pub fn run_holder_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    expect_kind(cfg, ExperimentKind::Holder)?;
    let rows = measure_rows(cfg)?;
    let (regime, predicted) = holder_regime(cfg);
    Ok(assemble(cfg, "holder_seminorm", rows, regime, predicted))
}

/// Calderón–Zygmund sweep: `‖∇²u‖_p / (‖Δu‖_p + ‖∇u‖_p)` per ε.
pub fn run_cz_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    expect_kind(cfg, ExperimentKind::Cz)?;
    let rows = measure_rows(cfg)?;
    let (regime, predicted) = cz_regime(cfg);
    Ok(assemble(cfg, "hessian_lp", rows, regime, predicted))
}

fn expect_kind(cfg: &SweepConfig, kind: ExperimentKind) -> Result<()> {
    if cfg.experiment != kind {
        return Err(Error::config(
            "experiment",
            format!(
                "expected `{}`, got `{}`",
                kind.name(),
                cfg.experiment.name()
            ),
        ));
    }
    cfg.validate()
}

fn assemble(
    cfg: &SweepConfig,
    measured: &'static str,
    rows: Vec<SweepRow>,
    regime: Regime,
    predicted_slope: Option<f64>,
) -> SweepReport {
    let mut report = SweepReport {
        experiment: cfg.experiment,
        measured,
        alpha: cfg.alpha(),
        regime,
        predicted_slope,
        fit: None,
        rules: Vec::new(),
        passed: false,
        rows,
    };
    let eps: Vec<f64> = report.rows.iter().map(|r| r.eps).collect();
    let vals = report.measured_values();
    let tail = final_decade(&eps);
    let tail_eps: Vec<f64> = tail.iter().map(|&i| eps[i]).collect();
    let tail_vals: Vec<f64> = tail.iter().map(|&i| vals[i]).collect();

    let mut rules = Vec::new();
    if regime != Regime::Null {
        match fit_power_law(&tail_eps, &tail_vals) {
            Ok(fit) => {
                report.fit = Some(fit);
                rules.push(RuleOutcome::new(
                    "fit-residual",
                    fit.max_residual < MAX_FIT_RESIDUAL,
                    format!(
                        "max log10 residual {:.3e} (limit {MAX_FIT_RESIDUAL})",
                        fit.max_residual
                    ),
                ));
            }
            Err(e) => rules.push(RuleOutcome::new("fit-residual", false, e.to_string())),
        }
    }
    match regime {
        Regime::BlowUp => {
            let pred = predicted_slope.expect("blow-up has a prediction");
            rules.push(match report.fit {
                Some(f) => RuleOutcome::new(
                    "slope",
                    (f.slope - pred).abs() <= SLOPE_RTOL * pred.abs(),
                    format!(
                        "fitted {:.5} vs predicted {:.5} (±{:.0}%)",
                        f.slope,
                        pred,
                        SLOPE_RTOL * 100.0
                    ),
                ),
                None => RuleOutcome::new("slope", false, "no fit".into()),
            });
            rules.push(monotone_rule(&eps, &vals));
        }
        Regime::Borderline => {
            rules.push(match report.fit {
                Some(f) => RuleOutcome::new(
                    "slope",
                    f.slope.abs() <= SLOPE_RTOL * 0.5,
                    format!(
                        "fitted {:.5} vs predicted 0 (|slope| ≤ {})",
                        f.slope,
                        SLOPE_RTOL * 0.5
                    ),
                ),
                None => RuleOutcome::new("slope", false, "no fit".into()),
            });
        }
        Regime::Bounded => {
            let (lo, hi) = tail_vals
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                    (a.min(v), b.max(v))
                });
            let spread = (hi - lo) / lo;
            rules.push(RuleOutcome::new(
                "bounded",
                spread < BOUNDED_SPREAD,
                format!(
                    "relative spread {spread:.4} over the final decade (limit {BOUNDED_SPREAD})"
                ),
            ));
        }
        Regime::Null => {
            let worst = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            rules.push(RuleOutcome::new(
                "null",
                worst < NULL_LEVEL,
                format!("largest value {worst:.3e} (limit {NULL_LEVEL:e})"),
            ));
        }
    }
    report.passed = rules.iter().all(|r| r.passed);
    report.rules = rules;
    report
}

/// `m(ε₁) ≥ m(ε₂)(1 − slack)` for every `ε₁ < ε₂`.
fn monotone_rule(eps: &[f64], vals: &[f64]) -> RuleOutcome {
    let mut worst = f64::INFINITY;
    for i in 0..eps.len() {
        for j in 0..eps.len() {
            if eps[i] < eps[j] {
                worst = worst.min(vals[i] / vals[j]);
            }
        }
    }
    RuleOutcome::new(
        "monotone",
        worst >= 1.0 - MONOTONE_SLACK,
        format!(
            "smallest ratio m(smaller ε)/m(larger ε) = {worst:.5} (limit {})",
            1.0 - MONOTONE_SLACK
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(doc: &str) -> SweepConfig {
        SweepConfig::from_json(doc).unwrap()
    }

    #[test]
    fn monotone_rule_allows_small_noise() {
        assert!(monotone_rule(&[1e-3, 1e-2, 1e-1], &[3.0, 2.0, 1.0]).passed);
        assert!(monotone_rule(&[1e-3, 1e-2], &[0.99, 1.0]).passed);
        assert!(!monotone_rule(&[1e-3, 1e-2], &[0.97, 1.0]).passed);
    }

    #[test]
    fn flat_cz_control_is_null() {
        let c = cfg(r#"{"experiment": "cz", "beta": 1.0, "p": 6,
            "epsilons": {"start": 0.1, "stop": 0.01, "count": 3, "spacing": "geometric"}}"#);
        let r = run_cz_sweep(&c).unwrap();
        assert_eq!(r.regime, Regime::Null);
        assert!(r.passed, "{:?}", r.rules);
        assert!(r.rows.iter().all(|row| row.hessian_lp.unwrap() < 1e-8));
    }

    #[test]
    fn small_holder_sweep_blows_up() {
        let c = cfg(
            r#"{"experiment": "holder", "beta": 0.6666666666666666, "gamma": 0.75,
            "epsilons": {"start": 0.01, "stop": 0.001, "count": 3, "spacing": "geometric"}}"#,
        );
        let r = run_holder_sweep(&c).unwrap();
        assert_eq!(r.regime, Regime::BlowUp);
        assert_eq!(r.rows.len(), 3);
        assert!(r.rows.windows(2).all(|w| w[0].eps > w[1].eps));
        assert!(r.passed, "{:?}", r.rules);
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let c = cfg(r#"{"experiment": "holder", "beta": 0.7, "gamma": 0.5,
            "epsilons": {"start": 0.1, "stop": 0.01, "count": 2, "spacing": "geometric"}}"#);
        assert!(matches!(run_cz_sweep(&c), Err(Error::Config { .. })));
    }

    #[test]
    fn deterministic_rows() {
        let c = cfg(r#"{"experiment": "cz", "beta": 0.75, "p": 8,
            "epsilons": {"start": 0.1, "stop": 0.01, "count": 3, "spacing": "geometric"}}"#);
        let a = run_cz_sweep(&c).unwrap();
        let b = run_cz_sweep(&c).unwrap();
        assert_eq!(a.rows, b.rows);
    }
}
