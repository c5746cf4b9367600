//! Pointwise differential quantities of `u = h(r) cos kθ`.

use crate::error::Result;
use crate::revolution::mode::{ModeSolution, ModeValue};
use crate::scalar::Scalar;

/// Covariant Hessian components in the coordinate frame `(∂_r, ∂_θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hessian<T> {
    pub rr: T,
    pub r_theta: T,
    pub theta_theta: T,
    /// `φ(r)`, needed to raise indices.
    pub phi: T,
}

impl<T: Scalar> Hessian<T> {
    /// `|∇²u|² = H_rr² + 2(H_rθ/φ)² + (H_θθ/φ²)²`.
    pub fn norm(&self) -> T {
        let a = self.r_theta / self.phi;
        let b = self.theta_theta / (self.phi * self.phi);
        (self.rr * self.rr + T::lit(2.0) * a * a + b * b).sqrt()
    }

    /// Metric trace `H_rr + H_θθ/φ² = Δu`.
    pub fn trace(&self) -> T {
        self.rr + self.theta_theta / (self.phi * self.phi)
    }
}

/// Radial amplitudes `(A, B)` of the angular profile `A² cos²kθ + B² sin²kθ`.
pub(crate) fn gradient_amplitudes<T: Scalar>(
    sol: &ModeSolution<T>,
    r: T,
    v: ModeValue<T>,
) -> (T, T) {
    let k = T::from_u32(sol.k()).expect("mode fits");
    (v.dh, k * v.h / sol.profile().phi(r))
}

pub(crate) fn hessian_amplitudes<T: Scalar>(
    sol: &ModeSolution<T>,
    r: T,
    v: ModeValue<T>,
) -> (T, T) {
    let p = sol.profile();
    let (phi, dphi) = (p.phi(r), p.dphi(r));
    let k = T::from_u32(sol.k()).expect("mode fits");
    let tt = (phi * dphi * v.dh - k * k * v.h) / (phi * phi);
    let mixed = k * (v.dh - dphi * v.h / phi) / phi;
    (
        (v.d2h * v.d2h + tt * tt).sqrt(),
        T::lit(2.0).sqrt() * mixed.abs(),
    )
}

/// `|∇u|(r, θ)`.
pub fn gradient_modulus<T: Scalar>(sol: &ModeSolution<T>, r: T, theta: T) -> Result<T> {
    let v = sol.eval(r)?;
    if r == T::zero() {
        return Ok(v.dh.abs());
    }
    let (a, b) = gradient_amplitudes(sol, r, v);
    let kt = T::from_u32(sol.k()).expect("mode fits") * theta;
    let (s, c) = kt.sin_cos();
    Ok((a * a * c * c + b * b * s * s).sqrt())
}

pub fn hessian<T: Scalar>(sol: &ModeSolution<T>, r: T, theta: T) -> Result<Hessian<T>> {
    let v = sol.eval(r)?;
    let p = sol.profile();
    let (phi, dphi) = (p.phi(r), p.dphi(r));
    let k = T::from_u32(sol.k()).expect("mode fits");
    let (s, c) = (k * theta).sin_cos();
    Ok(Hessian {
        rr: v.d2h * c,
        r_theta: -k * (v.dh - dphi * v.h / phi) * s,
        theta_theta: (-k * k * v.h + phi * dphi * v.dh) * c,
        phi,
    })
}

/// `|∇²u|(r, θ)`.
pub fn hessian_norm<T: Scalar>(sol: &ModeSolution<T>, r: T, theta: T) -> Result<T> {
    Ok(hessian(sol, r, theta)?.norm())
}

/// `Δu(r, θ)`, which vanishes for a harmonic mode.
pub fn hessian_trace<T: Scalar>(sol: &ModeSolution<T>, r: T, theta: T) -> Result<T> {
    Ok(hessian(sol, r, theta)?.trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::revolution::mode::solve_mode;
    use crate::revolution::profile::ProfileFunction;
    use approx::assert_relative_eq;

    #[test]
    fn flat_linear_function() {
        let sol = solve_mode(&ProfileFunction::flat(1.0).unwrap(), 1, 1e-8).unwrap();
        for &(r, t) in &[(0.1, 0.0), (0.5, 1.0), (0.9, 2.5), (1.0, 4.0)] {
            assert_relative_eq!(
                gradient_modulus(&sol, r, t).unwrap(),
                1.0,
                max_relative = 1e-10
            );
            assert!(hessian_norm(&sol, r, t).unwrap() < 1e-9);
        }
    }

    #[test]
    fn half_cone_closed_forms() {
        let sol = solve_mode(&ProfileFunction::exact_cone(0.5, 1.0).unwrap(), 1, 1e-8).unwrap();
        assert_relative_eq!(
            gradient_modulus(&sol, 0.5, 0.0).unwrap(),
            1.0,
            max_relative = 1e-9
        );
        // h = r², φ = r/2: H_rr = 2cosθ, H_rθ = −r sinθ, H_θθ = −r²cosθ/2
        for &(r, t) in &[(0.2f64, 0.3f64), (0.7, 1.9)] {
            let h = hessian(&sol, r, t).unwrap();
            assert_relative_eq!(h.rr, 2.0 * t.cos(), epsilon = 1e-8);
            assert_relative_eq!(h.r_theta, -r * t.sin(), epsilon = 1e-8);
            assert_relative_eq!(h.theta_theta, -r * r * t.cos() / 2.0, epsilon = 1e-8);
            assert!(h.trace().abs() < 1e-8);
            assert_relative_eq!(h.norm(), 8f64.sqrt(), max_relative = 1e-8);
        }
    }

    #[test]
    fn tracelessness_on_smoothed_modes() {
        let p = ProfileFunction::smoothed(2.0 / 3.0, 1e-3, 1.0).unwrap();
        for k in [1, 2, 3] {
            let sol = solve_mode(&p, k, 1e-8).unwrap();
            for r in sol.grid().iter().step_by(7) {
                for t in [0.0f64, 0.4, 1.3] {
                    let h = hessian(&sol, *r, t).unwrap();
                    assert!(h.trace().abs() < 1e-8 * (1.0 + h.norm()), "k={k} r={r}");
                }
            }
        }
    }

    #[test]
    fn gradient_is_isotropic_for_regular_modes() {
        // φh′ = kh makes both angular amplitudes equal
        let p = ProfileFunction::smoothed(0.7, 1e-2, 1.0).unwrap();
        let sol = solve_mode(&p, 2, 1e-8).unwrap();
        for r in [1e-3, 0.05, 0.6] {
            let a = gradient_modulus(&sol, r, 0.0).unwrap();
            let b = gradient_modulus(&sol, r, 0.77).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-8);
        }
    }

    #[test]
    fn hessian_grows_as_the_tip_sharpens() {
        let sup = |eps: f64| {
            let p = ProfileFunction::smoothed(2.0 / 3.0, eps, 1.0).unwrap();
            let sol = solve_mode(&p, 1, 1e-8).unwrap();
            sol.grid()
                .iter()
                .map(|&r| hessian_norm(&sol, r, 0.0).unwrap())
                .fold(0.0, f64::max)
        };
        let (a, b, c) = (sup(1e-1), sup(1e-2), sup(1e-3));
        assert!(a < b && b < c);
    }

    #[test]
    fn outside_range() {
        let sol = solve_mode(&ProfileFunction::flat(1.0).unwrap(), 1, 1e-8).unwrap();
        assert!(matches!(
            gradient_modulus(&sol, 2.0, 0.0),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            hessian_norm(&sol, -1.0, 0.0),
            Err(Error::Domain { .. })
        ));
    }
}
