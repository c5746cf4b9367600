//! `L^p` norms of mode fields over geodesic balls about the tip.
//!
//! The radial integral runs over dyadic panels `[R2^{−j−1}, R2^{−j}]` toward
//! the tip, each integrated by two Gauss–Legendre rules whose disagreement is
//! the reported error. The angular factor is integrated per radius.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::revolution::fields::{gradient_amplitudes, hessian_amplitudes};
use crate::revolution::mode::ModeSolution;
use crate::revolution::quadrature::GaussLegendre;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    /// `|∇u|`
    Gradient,
    /// `|∇²u|`
    Hessian,
    /// `|Δu|` computed from the radial equation residual.
    LaplacianResidual,
    /// `|u|`
    Value,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Gradient => "gradient",
            Field::Hessian => "hessian",
            Field::LaplacianResidual => "laplacian-residual",
            Field::Value => "value",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LpOptions<T> {
    /// Bound on the relative disagreement of the two radial rules.
    pub rel_tol: T,
    /// Points of the lower radial rule; the upper one uses twice as many.
    pub radial_order: usize,
    pub angular_order: usize,
    /// Dyadic panels allowed before the integral is declared divergent.
    pub max_levels: usize,
}

impl<T: Scalar> Default for LpOptions<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-8).max(T::epsilon() * T::lit(1e4)),
            radial_order: 12,
            angular_order: 32,
            max_levels: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpEstimate<T> {
    /// `(∫ field^p dA)^{1/p}`.
    pub norm: T,
    /// `∫ field^p dA`.
    pub integral: T,
    /// Relative disagreement between the two radial rules.
    pub rel_error: T,
    /// Dyadic panels used.
    pub levels: usize,
}

/// `∫₀^{2π} (A² cos²kθ + B² sin²kθ)^{p/2} dθ`, independent of `k`.
fn angular_factor<T: Scalar>(a: T, b: T, p: T, rule: &GaussLegendre<T>) -> T {
    let (a, b) = (a.abs(), b.abs());
    let two_pi = T::lit(2.0) * T::PI();
    if a == b {
        return two_pi * a.powf(p);
    }
    if a == T::zero() || b == T::zero() {
        // ∫₀^{2π} |cos θ|^p dθ = 2√π Γ((p+1)/2) / Γ(p/2 + 1)
        let pf = p.as_f64();
        let c = 2.0
            * std::f64::consts::PI.sqrt()
            * (ln_gamma((pf + 1.0) / 2.0) - ln_gamma(pf / 2.0 + 1.0)).exp();
        return T::lit(c) * a.max(b).powf(p);
    }
    let (a2, b2) = (a * a, b * b);
    let half_p = p * T::lit(0.5);
    T::lit(4.0)
        * rule.integrate(T::zero(), T::FRAC_PI_2(), |t| {
            let (s, c) = t.sin_cos();
            (a2 * c * c + b2 * s * s).powf(half_p)
        })
}

/// Angular amplitudes of the field and the size of the terms they are built
/// from, which sets the roundoff level of the amplitudes.
fn amplitudes<T: Scalar>(sol: &ModeSolution<T>, field: Field, r: T) -> (T, T, T) {
    let v = sol.eval(r).expect("radius inside the solved range");
    let profile = sol.profile();
    let phi = profile.phi(r);
    let k = T::from_u32(sol.k()).expect("mode fits");
    let terms =
        v.d2h.abs() + (profile.dphi(r) * v.dh / phi).abs() + (k * k * v.h / (phi * phi)).abs();
    match field {
        Field::Gradient => {
            let (a, b) = gradient_amplitudes(sol, r, v);
            (a, b, a.abs() + b.abs())
        }
        Field::Hessian => {
            let (a, b) = hessian_amplitudes(sol, r, v);
            (a, b, terms)
        }
        Field::LaplacianResidual => (
            sol.laplacian_residual(r)
                .expect("radius inside the solved range"),
            T::zero(),
            terms,
        ),
        Field::Value => (v.h, T::zero(), v.h.abs()),
    }
}

/// Relative size of the roundoff attributed to a field amplitude.
const ROUNDOFF_ULPS: f64 = 1024.0;

/// `(∫_{B_R} field^p dA)^{1/p}` with default options.
pub fn lp_norm<T: Scalar>(sol: &ModeSolution<T>, field: Field, p: T, radius: T) -> Result<T> {
    lp_estimate(sol, field, p, radius, &LpOptions::default()).map(|e| e.norm)
}

/// Quadrature with diagnostics. The tolerance is not enforced for
/// [`Field::LaplacianResidual`], whose exact value is zero.
pub fn lp_estimate<T: Scalar>(
    sol: &ModeSolution<T>,
    field: Field,
    p: T,
    radius: T,
    opts: &LpOptions<T>,
) -> Result<LpEstimate<T>> {
    if !(p >= T::one()) || !p.is_finite() {
        return Err(Error::domain("p", p.as_f64(), "must be at least 1"));
    }
    let r_max = sol.profile().r_max();
    if !(radius > T::zero()) || radius > r_max {
        return Err(Error::domain(
            "R",
            radius.as_f64(),
            format!("must lie in (0, {}]", r_max.as_f64()),
        ));
    }
    let lo_rule = GaussLegendre::new(opts.radial_order);
    let hi_rule = GaussLegendre::new(2 * opts.radial_order);
    let angular = GaussLegendre::new(opts.angular_order);
    let profile = sol.profile();
    let integrand = |r: T| {
        let (a, b, _) = amplitudes(sol, field, r);
        angular_factor(a, b, p, &angular) * profile.phi(r)
    };
    let noise_amp = T::epsilon() * T::lit(ROUNDOFF_ULPS);
    let noise = |r: T| {
        let (_, _, s) = amplitudes(sol, field, r);
        T::lit(2.0) * T::PI() * (noise_amp * s).powf(p) * profile.phi(r)
    };
    let diverged = |detail: String| Error::Divergent {
        field: field.name(),
        p: p.as_f64(),
        detail,
    };

    // panels must resolve the smoothing scale before the tail test applies
    let inner = profile.eps().unwrap_or(radius).min(radius) * T::lit(1.0 / 64.0);
    let threshold = opts.rel_tol * T::lit(1e-3);
    let half = T::lit(0.5);

    let (mut lo_total, mut hi_total, mut noise_total) = (T::zero(), T::zero(), T::zero());
    let mut quiet = 0;
    let mut outer = radius;
    let mut levels = 0;
    loop {
        if levels >= opts.max_levels {
            return Err(diverged(format!(
                "no convergence after {levels} dyadic panels (inner radius {:e})",
                outer.as_f64()
            )));
        }
        let inner_r = outer * half;
        let lo = lo_rule.integrate(inner_r, outer, integrand);
        let hi = hi_rule.integrate(inner_r, outer, integrand);
        if !lo.is_finite() || !hi.is_finite() {
            return Err(diverged(format!(
                "non-finite integrand near r = {:e}",
                inner_r.as_f64()
            )));
        }
        lo_total = lo_total + lo;
        hi_total = hi_total + hi;
        noise_total = noise_total + lo_rule.integrate(inner_r, outer, noise);
        levels += 1;
        outer = inner_r;
        if hi.abs() <= threshold * hi_total.abs() {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= 3 && outer < inner {
            break;
        }
    }
    lo_total = lo_total + lo_rule.integrate(T::zero(), outer, integrand);
    hi_total = hi_total + hi_rule.integrate(T::zero(), outer, integrand);

    let rel_error = if hi_total == T::zero() {
        (lo_total - hi_total).abs()
    } else {
        ((lo_total - hi_total) / hi_total).abs()
    };
    // an integrand at roundoff level (a vanishing Hessian) has no meaningful relative error
    let below_noise = (lo_total - hi_total).abs() <= noise_total;
    if field != Field::LaplacianResidual && rel_error > opts.rel_tol && !below_noise {
        return Err(Error::Quadrature {
            field: field.name(),
            estimate: rel_error.as_f64(),
            tolerance: opts.rel_tol.as_f64(),
        });
    }
    Ok(LpEstimate {
        norm: hi_total.powf(p.recip()),
        integral: hi_total,
        rel_error,
        levels,
    })
}

/// `‖u‖_{W^{1,2}(B_R)} = (‖u‖₂² + ‖∇u‖₂²)^{1/2}`.
pub fn w12_norm<T: Scalar>(sol: &ModeSolution<T>, radius: T) -> Result<T> {
    let two = T::lit(2.0);
    let v = lp_norm(sol, Field::Value, two, radius)?;
    let g = lp_norm(sol, Field::Gradient, two, radius)?;
    Ok((v * v + g * g).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revolution::mode::solve_mode;
    use crate::revolution::profile::ProfileFunction;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn flat_gradient_norm_is_area_power() {
        let sol = solve_mode(&ProfileFunction::flat(1.0).unwrap(), 1, 1e-8).unwrap();
        for p in [1.0, 2.0, 3.5, 6.0] {
            assert_relative_eq!(
                lp_norm(&sol, Field::Gradient, p, 1.0).unwrap(),
                PI.powf(1.0 / p),
                max_relative = 1e-10
            );
        }
        assert_relative_eq!(
            lp_norm(&sol, Field::Gradient, 2.0, 0.5).unwrap(),
            (PI * 0.25).sqrt(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn half_cone_gradient_energy() {
        // π ∫₀¹ (h′² + h²/φ²) φ dr with h = r², φ = r/2
        let sol = solve_mode(&ProfileFunction::exact_cone(0.5, 1.0).unwrap(), 1, 1e-8).unwrap();
        let n = 100_000;
        let oracle: f64 = (0..n)
            .map(|i| {
                let r = (i as f64 + 0.5) / n as f64;
                (4.0 * r * r + 4.0 * r * r) * r / 2.0
            })
            .sum::<f64>()
            * PI
            / n as f64;
        assert_relative_eq!(oracle, PI, max_relative = 1e-8);
        let norm = lp_norm(&sol, Field::Gradient, 2.0, 1.0).unwrap();
        assert_relative_eq!(norm * norm, oracle, max_relative = 1e-8);
    }

    #[test]
    fn exact_cone_closed_forms() {
        // h = r^α: |∇u| = α r^{α−1}, |∇²u| = √2 α(α−1) r^{α−2}, both isotropic
        let beta = 2.0f64 / 3.0;
        let alpha = 1.5f64;
        let sol = solve_mode(&ProfileFunction::exact_cone(beta, 1.0).unwrap(), 1, 1e-8).unwrap();
        for p in [2.0, 3.0, 3.5] {
            let grad = 2.0 * PI * beta * alpha.powf(p) / (p * (alpha - 1.0) + 2.0);
            let hess = 2.0 * PI * beta * (2f64.sqrt() * alpha * (alpha - 1.0)).powf(p)
                / (p * (alpha - 2.0) + 2.0);
            let g = lp_estimate(&sol, Field::Gradient, p, 1.0, &LpOptions::default()).unwrap();
            assert_relative_eq!(g.integral, grad, max_relative = 1e-7);
            let h = lp_estimate(&sol, Field::Hessian, p, 1.0, &LpOptions::default()).unwrap();
            assert_relative_eq!(h.integral, hess, max_relative = 1e-7);
        }
    }

    #[test]
    fn divergent_hessian_is_reported() {
        // p(α−2) + 2 ≤ 0 for α = 1.5 and p ≥ 4
        let sol = solve_mode(
            &ProfileFunction::exact_cone(2.0 / 3.0, 1.0).unwrap(),
            1,
            1e-8,
        )
        .unwrap();
        let r = lp_norm(&sol, Field::Hessian, 6.0, 1.0);
        assert!(
            matches!(
                r,
                Err(Error::Divergent {
                    field: "hessian",
                    ..
                })
            ),
            "{r:?}"
        );
    }

    #[test]
    fn residual_norm_is_negligible() {
        let p = ProfileFunction::smoothed(2.0 / 3.0, 1e-3, 1.0).unwrap();
        let sol = solve_mode(&p, 1, 1e-8).unwrap();
        let res = lp_norm(&sol, Field::LaplacianResidual, 2.0, 1.0).unwrap();
        let hess = lp_norm(&sol, Field::Hessian, 2.0, 1.0).unwrap();
        assert!(res < 1e-8 * hess, "{res} vs {hess}");
    }

    #[test]
    fn value_norm_of_flat_mode() {
        // ∫ r² cos²θ r dr dθ = π/4
        let sol = solve_mode(&ProfileFunction::flat(1.0).unwrap(), 1, 1e-8).unwrap();
        let v = lp_norm(&sol, Field::Value, 2.0, 1.0).unwrap();
        assert_relative_eq!(v * v, PI / 4.0, max_relative = 1e-10);
        assert_relative_eq!(
            w12_norm(&sol, 1.0).unwrap(),
            (PI / 4.0 + PI).sqrt(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn angular_factor_cases() {
        let rule = GaussLegendre::<f64>::new(32);
        // |cos|² integrates to π
        assert_relative_eq!(
            angular_factor(1.0, 0.0, 2.0, &rule),
            PI,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            angular_factor(0.0, 2.0, 2.0, &rule),
            4.0 * PI,
            max_relative = 1e-14
        );
        // p = 2: π(A² + B²)
        assert_relative_eq!(
            angular_factor(1.0, 3.0, 2.0, &rule),
            10.0 * PI,
            max_relative = 1e-13
        );
        // p = 4: (3A⁴ + 2A²B² + 3B⁴)π/4
        assert_relative_eq!(
            angular_factor(1.0, 2.0, 4.0, &rule),
            (3.0 + 8.0 + 48.0) * PI / 4.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn bad_arguments() {
        let sol = solve_mode(&ProfileFunction::flat(1.0).unwrap(), 1, 1e-8).unwrap();
        assert!(matches!(
            lp_norm(&sol, Field::Gradient, 0.5, 1.0),
            Err(Error::Domain { name: "p", .. })
        ));
        assert!(matches!(
            lp_norm(&sol, Field::Gradient, 2.0, 1.5),
            Err(Error::Domain { name: "R", .. })
        ));
    }
}
