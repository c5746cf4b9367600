//! Hölder quotients of `|∇u|` along the meridian `θ = 0`.

use crate::error::{Error, Result};
use crate::revolution::ModeSolution;

/// Radii of the pair grid: `R·2^{−j}` down to `ε·2^{−depth}`, the near-tip
/// ladder `ε·2^{−j}` for `j = 0..=depth`, and the tip itself. Exact cones,
/// having no smoothing scale, use `R·2^{−j}` for `j = 0..=depth`.
pub fn holder_points(sol: &ModeSolution<f64>, depth: u32) -> Vec<f64> {
    let profile = sol.profile();
    let r_max = profile.r_max();
    let mut pts = vec![0.0];
    match profile.eps() {
        Some(eps) => {
            let floor = eps * 0.5f64.powi(depth as i32);
            let mut r = r_max;
            while r >= floor {
                pts.push(r);
                r *= 0.5;
            }
            pts.extend(
                (0..=depth as i32)
                    .map(|j| eps * 0.5f64.powi(j))
                    .filter(|&r| r <= r_max),
            );
        }
        None => pts.extend((0..=depth as i32).map(|j| r_max * 0.5f64.powi(j))),
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `max ||∇u|(r₁) − |∇u|(r₂)| / |r₁ − r₂|^γ` over all pairs of
/// [`holder_points`] on the meridian, where `|∇u| = |h′|`.
///
/// A lower bound for the seminorm over the ball.
pub fn holder_seminorm_with(sol: &ModeSolution<f64>, gamma: f64, depth: u32) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::domain("gamma", gamma, "must lie in (0, 1]"));
    }
    let pts = holder_points(sol, depth);
    let vals = pts
        .iter()
        .map(|&r| sol.eval(r).map(|v| v.dh.abs()))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let q = (vals[i] - vals[j]).abs() / (pts[j] - pts[i]).powf(gamma);
            if q.is_finite() {
                best = best.max(q);
            }
        }
    }
    Ok(best)
}

/// [`holder_seminorm_with`] at the default depth of 12 levels below ε.
pub fn holder_seminorm(sol: &ModeSolution<f64>, gamma: f64) -> Result<f64> {
    holder_seminorm_with(sol, gamma, super::config::DEFAULT_HOLDER_DEPTH)
}
