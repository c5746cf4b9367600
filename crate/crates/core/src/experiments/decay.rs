//! Mean gradient energy `⨍_{B_R}|∇u|²` over dyadic radius ladders.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentKind, SweepConfig};
use super::fit::{fit_power_law, PowerLawFit};
use super::sweep::RuleOutcome;
use crate::cross_sections::CircleBase;
use crate::error::{Error, Result};
use crate::revolution::{lp_estimate, solve_mode, Field, LpOptions, ProfileFunction};
use crate::spectral::{
    decay_check, is_sharp, mean_ball_energy, sharpness_gap, ConeSpec, HarmonicExpansion,
};

/// Tolerance on the fitted exponent for closed-form cone energies.
pub const EXACT_EXPONENT_TOL: f64 = 1e-6;
/// Relative tolerance on the outer-regime exponent of smoothed profiles.
pub const OUTER_EXPONENT_RTOL: f64 = 0.15;
/// Absolute tolerance on the inner-regime exponent of smoothed profiles.
pub const INNER_EXPONENT_TOL: f64 = 0.1;

/// What the decay ladder is measured on.
#[derive(Debug, Clone)]
pub enum DecaySubject {
    /// Closed-form energies of a cone harmonic.
    Cone(HarmonicExpansion<f64>),
    /// Numerical mode `h(r) cos kθ` on a surface of revolution.
    Profile {
        profile: ProfileFunction<f64>,
        k: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    /// Smoothing scale, for profile subjects.
    pub eps: Option<f64>,
    pub radius: f64,
    pub mean_energy: f64,
    /// `⨍_{B_R} / ⨍_{B_{R₀}}` with `R₀` the largest radius.
    pub ratio: f64,
    /// `(R/R₀)^{predicted exponent}`.
    pub predicted_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    /// Whether the tip is a sharp point (cross-section diameter below π).
    pub sharp: bool,
    /// Expected exponent of `⨍_{B_R}|∇u|²` in `R` (outer regime for profiles).
    pub predicted_exponent: f64,
    pub fit: Option<PowerLawFit>,
    /// Inner-regime fit over `R ≤ ε/10`, for profiles.
    pub inner_fit: Option<PowerLawFit>,
    pub inner_predicted_exponent: Option<f64>,
    pub rules: Vec<RuleOutcome>,
    pub passed: bool,
    #[serde(skip)]
    pub rows: Vec<DecayRow>,
}

/// Radii `R₀·2^{−j}`, `j = 0..levels`.
pub fn dyadic_radii(r0: f64, levels: usize) -> Vec<f64> {
    (0..levels).map(|j| r0 * 0.5f64.powi(j as i32)).collect()
}

fn rows_with_ratios(
    eps: Option<f64>,
    radii: &[f64],
    means: &[f64],
    exponent: f64,
) -> Vec<DecayRow> {
    let (r0, m0) = (radii[0], means[0]);
    radii
        .iter()
        .zip(means)
        .map(|(&radius, &mean_energy)| DecayRow {
            eps,
            radius,
            mean_energy,
            ratio: mean_energy / m0,
            predicted_ratio: (radius / r0).powf(exponent),
        })
        .collect()
}

/// Tabulates `⨍_{B_R}|∇u|²` over `radii` (largest first) and fits the decay exponent.
pub fn run_decay_experiment(
    subject: &DecaySubject,
    radii: &[f64],
    sharp_only: bool,
    opts: &LpOptions<f64>,
    ode_tol: f64,
) -> Result<DecayReport> {
    if radii.len() < 2 {
        return Err(Error::config(
            "levels",
            "the decay ladder needs at least two radii",
        ));
    }
    match subject {
        DecaySubject::Cone(exp) => cone_decay(exp, radii, sharp_only),
        DecaySubject::Profile { profile, k } => {
            if sharp_only {
                return Err(Error::config(
                    "sharp_only",
                    "a smoothed profile has a smooth tip; sharp-only runs need an exact cone",
                ));
            }
            profile_decay(profile, *k, radii, opts, ode_tol)
        }
    }
}

fn cone_decay(
    exp: &HarmonicExpansion<f64>,
    radii: &[f64],
    sharp_only: bool,
) -> Result<DecayReport> {
    let cs = exp.cone().cross_section();
    let sharp = is_sharp(cs);
    if sharp_only && !sharp {
        return Err(Error::config(
            "sharp_only",
            format!(
                "cross-section diameter {} leaves sharpness gap {}; the cone is not sharp",
                cs.diameter(),
                sharpness_gap(cs)
            ),
        ));
    }
    let lowest = exp
        .coefficients()
        .iter()
        .filter(|(_, a)| *a != 0.0)
        .filter_map(|&(i, _)| exp.cone().alpha(i))
        .fold(f64::INFINITY, f64::min);
    if !lowest.is_finite() {
        return Err(Error::Degenerate(
            "expansion has no nonzero coefficient".into(),
        ));
    }
    let predicted = 2.0 * lowest - 2.0;
    let means = radii
        .iter()
        .map(|&r| mean_ball_energy(exp, r))
        .collect::<Result<Vec<_>>>()?;
    let rows = rows_with_ratios(None, radii, &means, predicted);
    let fit = fit_power_law(radii, &means)?;
    let lemma = decay_check(exp, radii)?;

    let mut rules = vec![
        RuleOutcome {
            rule: "exponent".into(),
            passed: (fit.slope - predicted).abs() <= EXACT_EXPONENT_TOL,
            detail: format!(
                "fitted {:.9} vs 2α−2 = {:.9} (±{EXACT_EXPONENT_TOL:e})",
                fit.slope, predicted
            ),
        },
        RuleOutcome {
            rule: "lemma-bound".into(),
            passed: lemma.passed,
            detail: format!("⨍_B_R ≤ R^{:.6}·⨍_B_1 at every radius", lemma.exponent),
        },
    ];
    if !sharp {
        let drop = means.iter().fold(0.0f64, |m, &v| m.max(1.0 - v / means[0]));
        rules.push(RuleOutcome {
            rule: "no-vanishing".into(),
            passed: predicted > 0.0 || drop <= EXACT_EXPONENT_TOL,
            detail: format!("largest relative drop of the mean energy {drop:.3e}"),
        });
    }
    let passed = rules.iter().all(|r| r.passed);
    Ok(DecayReport {
        sharp,
        predicted_exponent: predicted,
        fit: Some(fit),
        inner_fit: None,
        inner_predicted_exponent: None,
        rules,
        passed,
        rows,
    })
}

fn profile_decay(
    profile: &ProfileFunction<f64>,
    k: u32,
    radii: &[f64],
    opts: &LpOptions<f64>,
    ode_tol: f64,
) -> Result<DecayReport> {
    let sol = solve_mode(profile, k, ode_tol)?;
    let means = radii
        .par_iter()
        .map(|&r| {
            let g = lp_estimate(&sol, Field::Gradient, 2.0, r, opts)?.integral;
            Ok(g / profile.ball_area(r))
        })
        .collect::<Result<Vec<_>>>()?;
    let kf = k as f64;
    let outer_pred = 2.0 * kf / profile.beta() - 2.0;
    let inner_pred = 2.0 * kf / profile.tip_slope() - 2.0;
    let eps = profile.eps();
    let rows = rows_with_ratios(eps, radii, &means, outer_pred);

    let select = |keep: &dyn Fn(f64) -> bool| -> (Vec<f64>, Vec<f64>) {
        radii
            .iter()
            .zip(&means)
            .filter(|(r, _)| keep(**r))
            .map(|(r, m)| (*r, *m))
            .unzip()
    };
    let scale = eps.unwrap_or(0.0);
    let (ro, mo) = select(&|r| r >= 10.0 * scale);
    let (ri, mi) = select(&|r| eps.is_some() && r <= scale / 10.0);
    let fit = fit_power_law(&ro, &mo).ok();
    let inner_fit = fit_power_law(&ri, &mi).ok();

    let mut rules = vec![match fit {
        Some(f) => RuleOutcome {
            rule: "outer-exponent".into(),
            passed: (f.slope - outer_pred).abs()
                <= OUTER_EXPONENT_RTOL * outer_pred.abs().max(1e-12),
            detail: format!(
                "fitted {:.5} vs cone 2α−2 = {outer_pred:.5} over R ≥ 10ε",
                f.slope
            ),
        },
        None => RuleOutcome {
            rule: "outer-exponent".into(),
            passed: false,
            detail: "fewer than two radii with R ≥ 10ε".into(),
        },
    }];
    if eps.is_some() {
        rules.push(match inner_fit {
            Some(f) => RuleOutcome {
                rule: "inner-exponent".into(),
                passed: (f.slope - inner_pred).abs() <= INNER_EXPONENT_TOL,
                detail: format!(
                    "fitted {:.5} vs smooth-point {inner_pred:.5} over R ≤ ε/10",
                    f.slope
                ),
            },
            None => RuleOutcome {
                rule: "inner-exponent".into(),
                passed: false,
                detail: "fewer than two radii with R ≤ ε/10; raise `levels`".into(),
            },
        });
    }
    let passed = rules.iter().all(|r| r.passed);
    Ok(DecayReport {
        sharp: false,
        predicted_exponent: outer_pred,
        fit,
        inner_fit,
        inner_predicted_exponent: eps.map(|_| inner_pred),
        rules,
        passed,
        rows,
    })
}

/// Decay experiment from a config: the exact cone over the circle of
/// circumference `2πβ` with mode frequency `k`, or, when `epsilons` is
/// present, the smoothed profile at each ε.
pub fn run_decay_config(cfg: &SweepConfig) -> Result<Vec<DecayReport>> {
    if cfg.experiment != ExperimentKind::Decay {
        return Err(Error::config("experiment", "expected `decay`"));
    }
    cfg.validate()?;
    let opts = LpOptions {
        rel_tol: cfg.tolerances.quadrature,
        ..LpOptions::default()
    };
    let sharp_only = cfg.sharp_only.unwrap_or(false);
    match cfg.epsilons {
        None => {
            let levels = cfg.levels.unwrap_or(10);
            let exp = circle_mode(cfg.beta, cfg.k)?;
            let radii = dyadic_radii(cfg.r_max, levels);
            Ok(vec![run_decay_experiment(
                &DecaySubject::Cone(exp),
                &radii,
                sharp_only,
                &opts,
                cfg.tolerances.ode,
            )?])
        }
        Some(_) => cfg
            .epsilon_values()
            .iter()
            .map(|&eps| {
                let profile = ProfileFunction::smoothed(cfg.beta, eps, cfg.r_max)?;
                // reach well inside the smoothing scale
                let levels = cfg
                    .levels
                    .unwrap_or(((cfg.r_max / eps).log2().ceil() as usize).saturating_add(8));
                let radii = dyadic_radii(cfg.r_max, levels);
                run_decay_experiment(
                    &DecaySubject::Profile { profile, k: cfg.k },
                    &radii,
                    sharp_only,
                    &opts,
                    cfg.tolerances.ode,
                )
            })
            .collect(),
    }
}

/// `u = r^{k/β} cos(kθ)`-type single mode on the 2-cone over the circle of
/// circumference `2πβ`, with unit coefficient on the cosine eigenfunction.
pub fn circle_mode(beta: f64, k: u32) -> Result<HarmonicExpansion<f64>> {
    let index = 2 * k as usize - 1;
    let cs = CircleBase::new(beta)?.spectrum(index + 1)?;
    HarmonicExpansion::single(ConeSpec::new(2.0, cs)?, index, 1.0)
}
