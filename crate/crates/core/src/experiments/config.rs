use serde::{Deserialize, Serialize};

use crate::cross_sections::backticked;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Holder,
    Cz,
    Decay,
    Iterate,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Holder => "holder",
            ExperimentKind::Cz => "cz",
            ExperimentKind::Decay => "decay",
            ExperimentKind::Iterate => "iterate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl EpsilonGrid {
    /// Grid values in the order given by `start → stop`.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let ratio = self.stop / self.start;
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| match i {
                0 => self.start,
                i if i + 1 == self.count => self.stop,
                i => self.start * ratio.powf(i as f64 / last),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Scaled residual bound for the mode solver.
    #[serde(default = "default_tol")]
    pub ode: f64,
    /// Relative error bound for `L^p` quadrature.
    #[serde(default = "default_tol")]
    pub quadrature: f64,
}

fn default_tol() -> f64 {
    1e-8
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ode: default_tol(),
            quadrature: default_tol(),
        }
    }
}

fn default_k() -> u32 {
    1
}

fn default_r_max() -> f64 {
    1.0
}

/// One experiment, as read from a JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub experiment: ExperimentKind,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<EpsilonGrid>,
    #[serde(default = "default_k")]
    pub k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Dyadic levels of the Hölder pair grid below ε.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holder_depth: Option<u32>,
    /// Dyadic radii in the decay ladder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    /// Reject non-sharp cones in the decay experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sharp_only: Option<bool>,
    /// Forcing constant `C` of the dyadic iteration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forcing: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

pub const DEFAULT_HOLDER_DEPTH: u32 = 12;

impl SweepConfig {
    /// Parses and validates a JSON document.
    pub fn from_json(document: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(document);
        let cfg: SweepConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            let msg = e.inner().to_string();
            let key = if msg.starts_with("unknown field") {
                backticked(&msg).unwrap_or(path)
            } else if path == "." {
                backticked(&msg).unwrap_or_else(|| "<document>".into())
            } else {
                path
            };
            Error::config(key, msg)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Mode exponent `α = k/β` of the limiting cone.
    pub fn alpha(&self) -> f64 {
        self.k as f64 / self.beta
    }

    /// Smallest `p` for which the Hessian of the cone mode leaves `L^p`: `2/(2−α)`.
    pub fn cz_threshold(&self) -> Option<f64> {
        let a = self.alpha();
        (a < 2.0).then(|| 2.0 / (2.0 - a))
    }

    pub fn epsilon_values(&self) -> Vec<f64> {
        self.epsilons.map(|g| g.values()).unwrap_or_default()
    }

    pub fn holder_depth(&self) -> u32 {
        self.holder_depth.unwrap_or(DEFAULT_HOLDER_DEPTH)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, format!("{v} is not a positive number")))
            }
        };
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::config(
                "beta",
                format!("{} is outside (0, 1]", self.beta),
            ));
        }
        if self.k == 0 {
            return Err(Error::config("k", "mode must be at least 1"));
        }
        positive("r_max", self.r_max)?;
        positive("tolerances.ode", self.tolerances.ode)?;
        positive("tolerances.quadrature", self.tolerances.quadrature)?;
        if let Some(g) = &self.epsilons {
            positive("epsilons.start", g.start)?;
            positive("epsilons.stop", g.stop)?;
            if g.count == 0 {
                return Err(Error::config("epsilons.count", "must be at least 1"));
            }
            if g.count > 1 && g.start == g.stop {
                return Err(Error::config("epsilons.stop", "equals start but count > 1"));
            }
        }
        if self.holder_depth.is_some_and(|d| d > 60) {
            return Err(Error::config("holder_depth", "must be at most 60"));
        }
        if self.levels == Some(0) {
            return Err(Error::config("levels", "must be at least 1"));
        }

        match self.experiment {
            ExperimentKind::Holder => {
                self.require_epsilons()?;
                let gamma = self
                    .gamma
                    .ok_or_else(|| Error::config("gamma", "required by the holder experiment"))?;
                if !(gamma > 0.0 && gamma <= 1.0) {
                    return Err(Error::config("gamma", format!("{gamma} is outside (0, 1]")));
                }
            }
            ExperimentKind::Cz => {
                self.require_epsilons()?;
                let p = self
                    .p
                    .ok_or_else(|| Error::config("p", "required by the cz experiment"))?;
                let alpha = self.alpha();
                let Some(threshold) = self.cz_threshold() else {
                    return Err(Error::config(
                        "beta",
                        format!("α = k/β = {alpha} must be below 2 for a Hessian blow-up"),
                    ));
                };
                if !(p > threshold) || !p.is_finite() {
                    return Err(Error::config(
                        "p",
                        format!(
                            "p = {p} must exceed the threshold 2/(2−α) = {threshold} (α = k/β = {alpha}); \
                             below it the cone Hessian is in L^p and no blow-up is predicted"
                        ),
                    ));
                }
            }
            ExperimentKind::Decay => {}
            ExperimentKind::Iterate => {
                let p = self
                    .p
                    .ok_or_else(|| Error::config("p", "required by the iterate experiment"))?;
                if !(p > 2.0) || !p.is_finite() {
                    return Err(Error::config("p", format!("p = {p} must exceed N = 2")));
                }
                if self.beta == 1.0 {
                    return Err(Error::config(
                        "beta",
                        "the flat cone has no contraction (δ₀ = 0); choose β < 1",
                    ));
                }
                if let Some(c) = self.forcing {
                    if !(c >= 0.0) || !c.is_finite() {
                        return Err(Error::config(
                            "forcing",
                            format!("{c} is not a nonnegative number"),
                        ));
                    }
                }
                if let Some(e) = self.e0 {
                    if !(e >= 0.0) || !e.is_finite() {
                        return Err(Error::config(
                            "e0",
                            format!("{e} is not a nonnegative number"),
                        ));
                    }
                }
                if let Some(t) = self.threshold {
                    positive("threshold", t)?;
                }
            }
        }
        Ok(())
    }

    fn require_epsilons(&self) -> Result<()> {
        match &self.epsilons {
            Some(g) if g.count >= 2 => Ok(()),
            Some(_) => Err(Error::config(
                "epsilons.count",
                "a sweep needs at least two values",
            )),
            None => Err(Error::config(
                "epsilons",
                format!("required by the {} experiment", self.experiment.name()),
            )),
        }
    }
}
