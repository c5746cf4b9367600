//! Regular solution of `φ²h″ + φφ′h′ − k²h = 0` at the tip `r = 0`.
//!
//! With `φ = rψ`, `ψ(0) = φ′(0) > 0`, the indicial exponent is `s = k/ψ(0)` and
//! `h = r^s Σ aₙ rⁿ`. Coefficients are stored pre-multiplied by `ρⁿ` for a
//! reference radius `ρ`, so that evaluation uses `x = r/ρ ∈ (0, 1]`.

use crate::error::{Error, Result};
use crate::revolution::profile::ProfileFunction;
use crate::scalar::Scalar;

/// Extra orders used to estimate the truncation defect.
const DEFECT_ORDERS: usize = 8;
/// Consecutive negligible terms required before truncating.
const QUIET_TERMS: usize = 3;

#[derive(Debug, Clone)]
pub struct FrobeniusSeries<T> {
    exponent: T,
    rho: T,
    k: T,
    /// `aₙρⁿ`, with `a₀ = 1`.
    coeffs: Vec<T>,
    /// Scaled coefficients of `ψ²` and `ψ(ψ + rψ′)`.
    quad: Vec<T>,
    lin: Vec<T>,
    /// Scaled coefficients of `ψ`, for evaluating `ψ(r)` in the defect.
    psi: Vec<T>,
}

impl<T: Scalar> FrobeniusSeries<T> {
    /// Builds the series for mode `k` about the tip, referenced to radius `rho`.
    pub fn new(
        profile: &ProfileFunction<T>,
        k: u32,
        rho: T,
        rel_tol: T,
        max_terms: usize,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("k", 0.0, "mode must be at least 1"));
        }
        let kk = T::from_u32(k).expect("mode fits");
        let order = max_terms + DEFECT_ORDERS + 1;
        let f = profile.taylor_scaled(T::zero(), order + 1, rho);
        // ψₙρⁿ = fₙ₊₁ρⁿ⁺¹/ρ
        let psi: Vec<T> = f[1..].iter().map(|&c| c / rho).collect();
        let psi0 = psi[0];
        let exponent = kk / psi0;

        let mut quad = vec![T::zero(); order + 1];
        let mut lin = vec![T::zero(); order + 1];
        for n in 0..=order {
            let mut q = T::zero();
            let mut l = T::zero();
            for m in 0..=n {
                let prod = psi[m] * psi[n - m];
                q = q + prod;
                l = l + T::from_usize_lossy(1 + n - m) * prod;
            }
            quad[n] = q;
            lin[n] = l;
        }

        let mut series = Self {
            exponent,
            rho,
            k: kk,
            coeffs: vec![T::one()],
            quad,
            lin,
            psi,
        };
        let mut sum = T::one();
        let mut quiet = 0;
        for n in 1..=max_terms {
            let a = series.next_coefficient(n);
            series.coeffs.push(a);
            sum = sum + a;
            if !a.is_finite() {
                return Err(Error::Solver(format!(
                    "tip series for k = {k} produced a non-finite term at order {n}"
                )));
            }
            if a.abs() <= rel_tol * sum.abs() {
                quiet += 1;
                if quiet >= QUIET_TERMS {
                    series.coeffs.truncate(n + 1 - QUIET_TERMS);
                    return Ok(series);
                }
            } else {
                quiet = 0;
            }
        }
        Err(Error::Solver(format!(
            "tip series for k = {k} did not converge in {max_terms} terms at r = {:e}",
            rho.as_f64()
        )))
    }

    /// Sum of the recurrence terms feeding order `n` from orders `< n`,
    /// restricted to stored coefficients.
    fn feed(&self, n: usize) -> T {
        let s = self.exponent;
        let lo = n.saturating_sub(self.coeffs.len() - 1);
        let mut acc = T::zero();
        for m in lo.max(1)..=n {
            let j = T::from_usize_lossy(n - m) + s;
            acc = acc + (self.quad[m] * j * (j - T::one()) + self.lin[m] * j) * self.coeffs[n - m];
        }
        acc
    }

    fn next_coefficient(&self, n: usize) -> T {
        let j = T::from_usize_lossy(n) + self.exponent;
        let diag = self.quad[0] * j * (j - T::one()) + self.lin[0] * j - self.k * self.k;
        -self.feed(n) / diag
    }

    pub fn exponent(&self) -> T {
        self.exponent
    }

    pub fn reference_radius(&self) -> T {
        self.rho
    }

    pub fn terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Value at `ρ` divided by `ρ^s`, i.e. `Σ aₙρⁿ`.
    pub fn reference_sum(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, &c| acc + c)
    }

    /// `(Σ aₙxⁿ, Σ (n+s) aₙxⁿ, Σ (n+s)(n+s−1) aₙxⁿ)` at `x = r/ρ`.
    ///
    /// Multiplying by `r^s`, `r^{s−1}` and `r^{s−2}` gives `h`, `h′`, `h″`.
    pub fn reduced(&self, r: T) -> (T, T, T) {
        let x = r / self.rho;
        let s = self.exponent;
        let (mut v, mut d, mut dd) = (T::zero(), T::zero(), T::zero());
        for (n, &c) in self.coeffs.iter().enumerate().rev() {
            let j = T::from_usize_lossy(n) + s;
            v = v * x + c;
            d = d * x + j * c;
            dd = dd * x + j * (j - T::one()) * c;
        }
        (v, d, dd)
    }

    /// `(h, h′, h″)` of the unnormalized solution `r^s Σ aₙrⁿ`.
    pub fn eval(&self, r: T) -> (T, T, T) {
        let (v, d, dd) = self.reduced(r);
        let p = r.powf(self.exponent);
        (p * v, p * d / r, p * dd / (r * r))
    }

    /// Residual `h″ + φ′h′/φ − k²h/φ²` of the truncated series, divided by
    /// `r^{s−2}`, from the leading omitted orders of the recurrence.
    pub fn reduced_defect(&self, r: T) -> T {
        let x = r / self.rho;
        let last = self.coeffs.len() - 1;
        let mut acc = T::zero();
        let mut xp = x.powi(last as i32);
        for n in last + 1..=last + DEFECT_ORDERS {
            xp = xp * x;
            acc = acc + self.feed(n) * xp;
        }
        let mut psi = T::zero();
        for &c in self.psi.iter().take(last + DEFECT_ORDERS + 1).rev() {
            psi = psi * x + c;
        }
        acc / (psi * psi)
    }
}
