use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileKind<T> {
    /// `φ(r) = βr`, a cone of total angle `2πβ`.
    ExactCone { beta: T },
    /// `φ(r) = βr + (1−β) ε (1 − e^{−r/ε})`: smooth at the tip (`φ′(0) = 1`),
    /// concave, and asymptotic to the offset cone `βr + (1−β)ε`.
    Smoothed { beta: T, eps: T },
}

/// Warping profile of the surface of revolution `dr² + φ(r)² dθ²`, `θ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileFunction<T> {
    kind: ProfileKind<T>,
    r_max: T,
}

fn check_beta<T: Scalar>(beta: T) -> Result<()> {
    if beta > T::zero() && beta <= T::one() {
        Ok(())
    } else {
        Err(Error::domain("beta", beta.as_f64(), "must lie in (0, 1]"))
    }
}

fn check_r_max<T: Scalar>(r_max: T) -> Result<()> {
    if r_max > T::zero() && r_max.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("r_max", r_max.as_f64(), "must be positive"))
    }
}

impl<T: Scalar> ProfileFunction<T> {
    pub fn exact_cone(beta: T, r_max: T) -> Result<Self> {
        check_beta(beta)?;
        check_r_max(r_max)?;
        Ok(Self {
            kind: ProfileKind::ExactCone { beta },
            r_max,
        })
    }

    pub fn smoothed(beta: T, eps: T, r_max: T) -> Result<Self> {
        check_beta(beta)?;
        check_r_max(r_max)?;
        if !(eps > T::zero()) || !eps.is_finite() {
            return Err(Error::domain(
                "eps",
                eps.as_f64(),
                "smoothing scale must be positive",
            ));
        }
        Ok(Self {
            kind: ProfileKind::Smoothed { beta, eps },
            r_max,
        })
    }

    /// The flat plane `φ(r) = r`.
    pub fn flat(r_max: T) -> Result<Self> {
        Self::exact_cone(T::one(), r_max)
    }

    pub fn kind(&self) -> ProfileKind<T> {
        self.kind
    }

    pub fn r_max(&self) -> T {
        self.r_max
    }

    pub fn beta(&self) -> T {
        match self.kind {
            ProfileKind::ExactCone { beta } | ProfileKind::Smoothed { beta, .. } => beta,
        }
    }

    /// Smoothing scale `ε`, if any.
    pub fn eps(&self) -> Option<T> {
        match self.kind {
            ProfileKind::ExactCone { .. } => None,
            ProfileKind::Smoothed { eps, .. } => Some(eps),
        }
    }

    /// `φ′(0)`; the regular mode behaves like `r^{k/φ′(0)}` at the tip.
    pub fn tip_slope(&self) -> T {
        match self.kind {
            ProfileKind::ExactCone { beta } => beta,
            ProfileKind::Smoothed { .. } => T::one(),
        }
    }

    pub fn phi(&self, r: T) -> T {
        match self.kind {
            ProfileKind::ExactCone { beta } => beta * r,
            ProfileKind::Smoothed { beta, eps } => {
                beta * r - (T::one() - beta) * eps * (-r / eps).exp_m1()
            }
        }
    }

    pub fn dphi(&self, r: T) -> T {
        match self.kind {
            ProfileKind::ExactCone { beta } => beta,
            ProfileKind::Smoothed { beta, eps } => beta + (T::one() - beta) * (-r / eps).exp(),
        }
    }

    pub fn d2phi(&self, r: T) -> T {
        match self.kind {
            ProfileKind::ExactCone { .. } => T::zero(),
            ProfileKind::Smoothed { beta, eps } => -(T::one() - beta) / eps * (-r / eps).exp(),
        }
    }

    /// Scaled Taylor coefficients `φ^{(n)}(r0) ρⁿ / n!` for `n = 0..=order`.
    ///
    /// Scaling by a reference length `ρ` keeps high orders finite when the
    /// profile varies on a scale `ε ≪ 1`.
    pub fn taylor_scaled(&self, r0: T, order: usize, rho: T) -> Vec<T> {
        let mut out = vec![T::zero(); order + 1];
        out[0] = self.phi(r0);
        if order >= 1 {
            out[1] = self.dphi(r0) * rho;
        }
        if let ProfileKind::Smoothed { beta, eps } = self.kind {
            // φ^{(n)} = −(1−β) ε (−1/ε)ⁿ e^{−r0/ε} for n ≥ 2
            let mut term = -(T::one() - beta) * eps * (-r0 / eps).exp() * (-rho / eps);
            for (n, slot) in out.iter_mut().enumerate().skip(2) {
                term = term * (-rho / eps) / T::from_usize_lossy(n);
                *slot = term;
            }
        }
        out
    }

    /// Area `2π ∫₀^R φ(r) dr` of the geodesic ball about the tip.
    pub fn ball_area(&self, radius: T) -> T {
        let two_pi = T::lit(2.0) * T::PI();
        let half = T::lit(0.5);
        match self.kind {
            ProfileKind::ExactCone { beta } => two_pi * half * beta * radius * radius,
            ProfileKind::Smoothed { beta, eps } => {
                let smooth = (T::one() - beta) * eps * (radius + eps * (-radius / eps).exp_m1());
                two_pi * (half * beta * radius * radius + smooth)
            }
        }
    }
}

/// Gauss curvature `K = −φ″/φ`.
pub fn gauss_curvature<T: Scalar>(profile: &ProfileFunction<T>, r: T) -> T {
    -profile.d2phi(r) / profile.phi(r)
}
