//! Regular harmonic modes `u = h(r) cos kθ` on `dr² + φ(r)² dθ²`.
//!
//! The radial equation `h″ + (φ′/φ)h′ − k²h/φ² = 0` is started from the tip
//! series and continued in `t = ln r` for the state `(h, φh′)`, which turns
//! the power-law growth into a near-linear one. Each accepted step becomes a
//! node carrying a local Taylor jet, and `h`, `h′`, `h″` are reconstructed by
//! quintic Hermite interpolation between nodes.

use crate::error::{Error, Result};
use crate::revolution::frobenius::FrobeniusSeries;
use crate::revolution::integrator::{integrate, IntegrationStats, StepControl};
use crate::revolution::profile::ProfileFunction;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions<T> {
    /// Relative tolerance of the embedded Runge–Kutta error estimate.
    pub ode_rtol: T,
    /// Bound on the scaled ODE residual at nodes and interval midpoints.
    pub residual_tol: T,
    /// Largest step in `ln r`.
    pub max_log_step: T,
    /// Relative size below which tip-series terms are dropped.
    pub series_tol: T,
    pub max_series_terms: usize,
    /// Times the step cap is reduced before the residual check gives up.
    pub max_refinements: usize,
    pub max_steps: usize,
}

impl<T: Scalar> Default for SolveOptions<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        Self {
            ode_rtol: T::lit(1e-13).max(eps * T::lit(64.0)),
            residual_tol: T::lit(1e-8).max(eps * T::lit(1024.0)),
            max_log_step: T::lit(0.02),
            series_tol: T::lit(1e-16).max(eps * T::lit(0.5)),
            max_series_terms: 400,
            max_refinements: 3,
            max_steps: 2_000_000,
        }
    }
}

/// `h`, `h′`, `h″` at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeValue<T> {
    pub h: T,
    pub dh: T,
    pub d2h: T,
}

/// One row of the reporting grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSample<T> {
    pub r: T,
    pub h: T,
    pub dh: T,
    pub d2h: T,
    pub residual: T,
}

#[derive(Debug, Clone, Copy)]
struct Node<T> {
    r: T,
    /// Taylor coefficients of `h` about `r`.
    jet: [T; 5],
}

#[derive(Debug, Clone)]
pub struct ModeSolution<T> {
    k: u32,
    profile: ProfileFunction<T>,
    series: FrobeniusSeries<T>,
    /// `h = tip_scale · (r/ρ)^s · Σ aₙ(r/ρ)ⁿ` below the first node.
    tip_scale: T,
    nodes: Vec<Node<T>>,
    residuals: Vec<T>,
    stats: IntegrationStats,
}

/// Scaled residual of the radial equation:
/// `|h″ + φ′h′/φ − k²h/φ²| / (|h″| + |φ′h′/φ| + |k²h/φ²|)`.
pub fn scaled_residual<T: Scalar>(
    profile: &ProfileFunction<T>,
    k: u32,
    r: T,
    v: ModeValue<T>,
) -> T {
    let phi = profile.phi(r);
    let kk = T::from_u32(k).expect("mode fits");
    let a = v.d2h;
    let b = profile.dphi(r) * v.dh / phi;
    let c = kk * kk * v.h / (phi * phi);
    let den = a.abs() + b.abs() + c.abs();
    if den == T::zero() {
        T::zero()
    } else {
        (a + b - c).abs() / den
    }
}

/// Taylor jet `c₀..c₄` of `h` about a regular point from `h` and `h′`.
fn node_jet<T: Scalar>(profile: &ProfileFunction<T>, k: u32, r0: T, h: T, dh: T) -> [T; 5] {
    let f = profile.taylor_scaled(r0, 4, T::one());
    let kk = T::from_u32(k).expect("mode fits");
    let k2 = kk * kk;
    // φ² and φφ′ about r0
    let mut sq = [T::zero(); 4];
    let mut pd = [T::zero(); 3];
    for n in 0..4 {
        for i in 0..=n {
            sq[n] = sq[n] + f[i] * f[n - i];
        }
    }
    for (n, slot) in pd.iter_mut().enumerate() {
        for i in 0..=n {
            *slot = *slot + f[i] * T::from_usize_lossy(n - i + 1) * f[n - i + 1];
        }
    }
    let mut c = [h, dh, T::zero(), T::zero(), T::zero()];
    for n in 0..3 {
        let mut rhs = k2 * c[n];
        for m in 1..=n {
            let j = n - m + 2;
            rhs = rhs - sq[m] * T::from_usize_lossy(j * (j - 1)) * c[j];
        }
        for m in 0..=n {
            let j = n - m + 1;
            rhs = rhs - pd[m] * T::from_usize_lossy(j) * c[j];
        }
        c[n + 2] = rhs / (sq[0] * T::from_usize_lossy((n + 2) * (n + 1)));
    }
    c
}

/// Quintic Hermite interpolation on `[0, L]` from value, slope and curvature at both ends.
fn hermite5<T: Scalar>(x: T, len: T, left: [T; 3], right: [T; 3]) -> T {
    let one = T::one();
    let x2 = x * x;
    let x3 = x2 * x;
    let x4 = x3 * x;
    let x5 = x4 * x;
    let l = T::lit;
    let h0 = one - l(10.0) * x3 + l(15.0) * x4 - l(6.0) * x5;
    let h1 = x - l(6.0) * x3 + l(8.0) * x4 - l(3.0) * x5;
    let h2 = (x2 - l(3.0) * x3 + l(3.0) * x4 - x5) * l(0.5);
    let h3 = l(10.0) * x3 - l(15.0) * x4 + l(6.0) * x5;
    let h4 = -l(4.0) * x3 + l(7.0) * x4 - l(3.0) * x5;
    let h5 = (x3 - l(2.0) * x4 + x5) * l(0.5);
    left[0] * h0
        + len * left[1] * h1
        + len * len * left[2] * h2
        + right[0] * h3
        + len * right[1] * h4
        + len * len * right[2] * h5
}

/// Hand-off radius between the tip series and the integrator.
fn series_radius<T: Scalar>(profile: &ProfileFunction<T>) -> T {
    let floor = T::lit(1e-6);
    let base = match profile.eps() {
        Some(eps) => (eps * T::lit(0.1)).max(floor),
        None => floor,
    };
    base.min(profile.r_max() * T::lit(0.5))
}

/// Solves mode `k` with default options and residual tolerance `tol`.
pub fn solve_mode<T: Scalar>(
    profile: &ProfileFunction<T>,
    k: u32,
    tol: T,
) -> Result<ModeSolution<T>> {
    let opts = SolveOptions {
        residual_tol: tol,
        ..SolveOptions::default()
    };
    solve_mode_with(profile, k, &opts)
}

pub fn solve_mode_with<T: Scalar>(
    profile: &ProfileFunction<T>,
    k: u32,
    opts: &SolveOptions<T>,
) -> Result<ModeSolution<T>> {
    if k == 0 {
        return Err(Error::domain("k", 0.0, "mode must be at least 1"));
    }
    if !(opts.residual_tol > T::zero()) {
        return Err(Error::domain(
            "tol",
            opts.residual_tol.as_f64(),
            "must be positive",
        ));
    }
    let rho = series_radius(profile);
    let series = FrobeniusSeries::new(profile, k, rho, opts.series_tol, opts.max_series_terms)?;

    let mut cap = opts.max_log_step;
    let mut last_err = None;
    for _ in 0..=opts.max_refinements {
        let sol = march(profile, k, &series, opts, cap)?;
        let worst = sol.max_residual();
        if worst <= opts.residual_tol {
            return Ok(sol);
        }
        let at = sol
            .residuals
            .iter()
            .position(|&v| v == worst)
            .map(|i| sol.nodes[i].r.as_f64())
            .unwrap_or(f64::NAN);
        last_err = Some(Error::Solver(format!(
            "residual {:e} exceeds tolerance {:e} near r = {at:e} (k = {k}, max ln-step {:e})",
            worst.as_f64(),
            opts.residual_tol.as_f64(),
            cap.as_f64()
        )));
        cap = cap * T::lit(0.25);
    }
    Err(last_err.expect("at least one attempt"))
}

fn march<T: Scalar>(
    profile: &ProfileFunction<T>,
    k: u32,
    series: &FrobeniusSeries<T>,
    opts: &SolveOptions<T>,
    max_log_step: T,
) -> Result<ModeSolution<T>> {
    let rho = series.reference_radius();
    let r_max = profile.r_max();
    let kk = T::from_u32(k).expect("mode fits");
    let k2 = kk * kk;
    let (v0, d0, _) = series.reduced(rho);
    // start from h(ρ) = 1, so φh′ = φ(ρ)·(Σ(n+s)aₙ)/(ρ Σaₙ)
    let w0 = profile.phi(rho) * d0 / (rho * v0);

    let big = T::max_value().sqrt().sqrt();
    let mut raw: Vec<(T, T, T, T)> = vec![(rho, T::one(), w0, T::zero())];
    let mut log_scale = T::zero();

    let rhs = |t: T, y: &[T; 2]| {
        let r = t.exp();
        let phi = profile.phi(r);
        [r * y[1] / phi, r * k2 * y[0] / phi]
    };
    let ctl = StepControl {
        rtol: opts.ode_rtol,
        atol: T::min_positive_value().sqrt(),
        max_step: max_log_step,
        min_step: max_log_step * T::epsilon() * T::lit(16.0),
        max_steps: opts.max_steps,
    };
    let t1 = r_max.ln();
    let stats = integrate(rhs, rho.ln(), [T::one(), w0], t1, &ctl, |t, y| {
        let r = if t == t1 { r_max } else { t.exp() };
        raw.push((r, y[0], y[1], log_scale));
        if y[0].abs() > big {
            let s = y[0];
            log_scale = log_scale + s.ln();
            y[0] = T::one();
            y[1] = y[1] / s;
            true
        } else {
            false
        }
    })?;

    let &(_, h_end, _, l_end) = raw.last().expect("end node");
    let nodes: Vec<Node<T>> = raw
        .iter()
        .map(|&(r, h, w, l)| {
            let growth = (l - l_end).exp();
            let hn = h / h_end * growth;
            let dh = w / h_end * growth / profile.phi(r);
            Node {
                r,
                jet: node_jet(profile, k, r, hn, dh),
            }
        })
        .collect();
    let tip_scale = (-l_end).exp() / (h_end * v0);

    let mut sol = ModeSolution {
        k,
        profile: *profile,
        series: series.clone(),
        tip_scale,
        nodes,
        residuals: Vec::new(),
        stats,
    };
    sol.residuals = sol.node_residuals();
    Ok(sol)
}

impl<T: Scalar> ModeSolution<T> {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn profile(&self) -> &ProfileFunction<T> {
        &self.profile
    }

    pub fn series(&self) -> &FrobeniusSeries<T> {
        &self.series
    }

    pub fn stats(&self) -> IntegrationStats {
        self.stats
    }

    /// Radii of the reporting grid; the first is the series hand-off radius,
    /// the last is `R_max`.
    pub fn grid(&self) -> Vec<T> {
        self.nodes.iter().map(|n| n.r).collect()
    }

    pub fn series_radius(&self) -> T {
        self.nodes[0].r
    }

    /// Worst scaled residual at each node and the midpoint to its right.
    pub fn residuals(&self) -> &[T] {
        &self.residuals
    }

    pub fn max_residual(&self) -> T {
        self.residuals.iter().fold(T::zero(), |a, &b| a.max(b))
    }

    fn node_residuals(&self) -> Vec<T> {
        let n = self.nodes.len();
        (0..n)
            .map(|i| {
                let r = self.nodes[i].r;
                let mut worst = self.scaled_residual_at(r);
                if i + 1 < n {
                    let mid = (r + self.nodes[i + 1].r) * T::lit(0.5);
                    worst = worst.max(self.scaled_residual_at(mid));
                }
                worst
            })
            .collect()
    }

    fn scaled_residual_at(&self, r: T) -> T {
        let v = self.eval_unchecked(r);
        scaled_residual(&self.profile, self.k, r, v)
    }

    fn check_radius(&self, r: T) -> Result<()> {
        let limit = self.profile.r_max() * (T::one() + T::epsilon() * T::lit(4.0));
        if r >= T::zero() && r <= limit {
            Ok(())
        } else {
            Err(Error::domain(
                "r",
                r.as_f64(),
                format!(
                    "outside the solved range [0, {}]",
                    self.profile.r_max().as_f64()
                ),
            ))
        }
    }

    /// `h`, `h′`, `h″` at `r ∈ [0, R_max]`.
    pub fn eval(&self, r: T) -> Result<ModeValue<T>> {
        self.check_radius(r)?;
        Ok(self.eval_unchecked(r))
    }

    fn eval_unchecked(&self, r: T) -> ModeValue<T> {
        if r <= T::zero() {
            return self.tip_value();
        }
        if r < self.nodes[0].r {
            let rho = self.series.reference_radius();
            let (v, d, dd) = self.series.reduced(r);
            let p = self.tip_scale * (r / rho).powf(self.series.exponent());
            return ModeValue {
                h: p * v,
                dh: p * d / r,
                d2h: p * dd / (r * r),
            };
        }
        let i = self.locate(r);
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        let len = b.r - a.r;
        let x = (r - a.r) / len;
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        let twenty_four = T::lit(24.0);
        let (p, q) = (&a.jet, &b.jet);
        ModeValue {
            h: hermite5(x, len, [p[0], p[1], two * p[2]], [q[0], q[1], two * q[2]]),
            dh: hermite5(
                x,
                len,
                [p[1], two * p[2], six * p[3]],
                [q[1], two * q[2], six * q[3]],
            ),
            d2h: hermite5(
                x,
                len,
                [two * p[2], six * p[3], twenty_four * p[4]],
                [two * q[2], six * q[3], twenty_four * q[4]],
            ),
        }
    }

    /// Limits at `r → 0⁺`; derivatives blow up when the tip exponent is below the order.
    fn tip_value(&self) -> ModeValue<T> {
        let s = self.series.exponent();
        let rho = self.series.reference_radius();
        let a0 = self.tip_scale;
        let limit = |order: T, factor: T| {
            if s > order {
                T::zero()
            } else if s == order {
                factor * a0 / rho.powf(order)
            } else {
                T::infinity()
            }
        };
        ModeValue {
            h: T::zero(),
            dh: limit(T::one(), s),
            d2h: limit(T::lit(2.0), s * (s - T::one())),
        }
    }

    /// Index `i` of the node interval `[rᵢ, rᵢ₊₁]` containing `r ≥ r₀`.
    fn locate(&self, r: T) -> usize {
        let n = self.nodes.len();
        let i = self.nodes.partition_point(|node| node.r <= r);
        i.clamp(1, n - 1) - 1
    }

    /// `h″ + φ′h′/φ − k²h/φ²` at `r`; below the hand-off radius this is the
    /// truncation defect of the tip series.
    pub fn laplacian_residual(&self, r: T) -> Result<T> {
        self.check_radius(r)?;
        if r <= T::zero() {
            return Ok(T::zero());
        }
        if r < self.nodes[0].r {
            let rho = self.series.reference_radius();
            let s = self.series.exponent();
            let p = self.tip_scale * (r / rho).powf(s) / (r * r);
            return Ok(p * self.series.reduced_defect(r));
        }
        let v = self.eval_unchecked(r);
        let phi = self.profile.phi(r);
        let kk = T::from_u32(self.k).expect("mode fits");
        Ok(v.d2h + self.profile.dphi(r) * v.dh / phi - kk * kk * v.h / (phi * phi))
    }

    /// Rows `r, h, h′, h″, residual` at every node.
    pub fn samples(&self) -> Vec<ModeSample<T>> {
        self.nodes
            .iter()
            .zip(&self.residuals)
            .map(|(n, &res)| ModeSample {
                r: n.r,
                h: n.jet[0],
                dh: n.jet[1],
                d2h: n.jet[2] * T::lit(2.0),
                residual: res,
            })
            .collect()
    }

    /// `h > 0` and `h′ > 0` at every node.
    pub fn is_positive(&self) -> bool {
        self.nodes
            .iter()
            .all(|n| n.jet[0] > T::zero() && n.jet[1] > T::zero())
    }
}
