//! Harmonic functions on N-dimensional metric measure cones.
//!
//! A cone `C = Con(X)` over a cross-section `X` carries the measure
//! `r^{N-1} dr ⊗ dm_X` and the gradient `|∇f|² = (∂_r f)² + r⁻²|∇_X f|²`.
//! Harmonic functions on the unit ball split as `u = Σ a_i r^{α_i} φ_i(x)`
//! with `φ_i` the (L²-normalized) eigenfunctions of the cross-section, so
//! every energy quantity below is a closed form in the spectrum alone.
//! Eigenfunctions are never materialized.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative slack used by the closed-form inequality checks.
pub const IDENTITY_RTOL: f64 = 1e-12;

/// Spectral data of a cone base space.
///
/// Eigenvalues are listed with multiplicity, starting from the constant
/// mode `λ₀ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection<T> {
    eigenvalues: Vec<T>,
    diameter: T,
    mass: T,
    base_dimension: T,
}

impl<T: Scalar> CrossSection<T> {
    /// Validated constructor: `λ₀ = 0`, nondecreasing nonnegative spectrum,
    /// `0 < diameter ≤ π`, positive mass, nonnegative base dimension.
    pub fn new(eigenvalues: Vec<T>, diameter: T, mass: T, base_dimension: T) -> Result<Self> {
        let cs = Self::new_unrestricted(eigenvalues, diameter, mass, base_dimension)?;
        // allow a few ulps so that π·β with β = 1 is accepted
        if cs.diameter > T::PI() * (T::one() + T::lit(4.0) * T::epsilon()) {
            return Err(Error::domain(
                "diameter",
                cs.diameter.as_f64(),
                "must not exceed π for an admissible cone base",
            ));
        }
        Ok(cs)
    }

    /// Same as [`CrossSection::new`] but accepts diameters above π.
    ///
    /// Only used to build negative controls (circles longer than 2π) that the
    /// admissibility checks are expected to reject.
    pub fn new_unrestricted(
        eigenvalues: Vec<T>,
        diameter: T,
        mass: T,
        base_dimension: T,
    ) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::Structure("eigenvalue list is empty".into()));
        }
        if eigenvalues[0] != T::zero() {
            return Err(Error::domain(
                "eigenvalues[0]",
                eigenvalues[0].as_f64(),
                "the constant mode must have eigenvalue 0",
            ));
        }
        for (i, w) in eigenvalues.windows(2).enumerate() {
            if !w[1].is_finite() || w[1] < T::zero() {
                return Err(Error::domain(
                    "eigenvalues",
                    w[1].as_f64(),
                    format!("entry {} must be finite and nonnegative", i + 1),
                ));
            }
            if w[1] < w[0] {
                return Err(Error::domain(
                    "eigenvalues",
                    w[1].as_f64(),
                    format!("entry {} is smaller than its predecessor", i + 1),
                ));
            }
        }
        if !(diameter > T::zero()) || !diameter.is_finite() {
            return Err(Error::domain(
                "diameter",
                diameter.as_f64(),
                "must be positive",
            ));
        }
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(Error::domain("mass", mass.as_f64(), "must be positive"));
        }
        if !(base_dimension >= T::zero()) || !base_dimension.is_finite() {
            return Err(Error::domain(
                "base_dimension",
                base_dimension.as_f64(),
                "must be nonnegative",
            ));
        }
        Ok(Self {
            eigenvalues,
            diameter,
            mass,
            base_dimension,
        })
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn diameter(&self) -> T {
        self.diameter
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn base_dimension(&self) -> T {
        self.base_dimension
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// `α = (−(N−2) + √((N−2)² + 4λ)) / 2`, the radial growth exponent of the
/// cone harmonic built on an eigenfunction with eigenvalue `λ`.
pub fn alpha_exponent<T: Scalar>(n: T, lambda: T) -> Result<T> {
    let two = T::lit(2.0);
    if !(n >= two) || !n.is_finite() {
        return Err(Error::domain("N", n.as_f64(), "cone dimension must be ≥ 2"));
    }
    if !(lambda >= T::zero()) || !lambda.is_finite() {
        return Err(Error::domain(
            "lambda",
            lambda.as_f64(),
            "eigenvalue must be ≥ 0",
        ));
    }
    let b = n - two;
    let disc = (b * b + T::lit(4.0) * lambda).sqrt();
    // (−b + √(b²+4λ))/2 rewritten as 2λ/(b + √(b²+4λ)) to avoid cancellation
    if b > T::zero() {
        Ok(two * lambda / (b + disc))
    } else {
        Ok(disc / two)
    }
}

/// Outcome of the spectral admissibility test `λ₁ ≥ N − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObataCheck<T> {
    pub passed: bool,
    /// `λ₁ − (N − 1)`; negative when the check fails.
    pub margin: T,
}

pub fn obata_check<T: Scalar>(cs: &CrossSection<T>, n: T) -> Result<ObataCheck<T>> {
    if cs.len() < 2 {
        return Err(Error::Structure(
            "the admissibility check needs at least two eigenvalues".into(),
        ));
    }
    let margin = cs.eigenvalues[1] - (n - T::one());
    Ok(ObataCheck {
        passed: margin >= T::zero(),
        margin,
    })
}

/// Spectral-gap surplus for a circle cross-section of diameter `π − ε`.
///
/// The circle of circumference `2(π − ε)` has `λ₁ = (π/(π−ε))²`, so the
/// surplus over the 2-cone threshold `λ₁ ≥ 1` is `(π/(π−ε))² − 1`.
pub fn delta1_circle<T: Scalar>(eps_diam: T) -> Result<T> {
    if !(eps_diam > T::zero() && eps_diam < T::PI()) {
        return Err(Error::domain(
            "eps_diam",
            eps_diam.as_f64(),
            "must lie in (0, π)",
        ));
    }
    let ratio = T::PI() / (T::PI() - eps_diam);
    Ok(ratio * ratio - T::one())
}

/// An N-cone over a cross-section with its harmonic exponents precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSpec<T> {
    n: T,
    cross_section: CrossSection<T>,
    alphas: Vec<T>,
}

impl<T: Scalar> ConeSpec<T> {
    pub fn new(n: T, cross_section: CrossSection<T>) -> Result<Self> {
        let alphas = cross_section
            .eigenvalues
            .iter()
            .map(|&l| alpha_exponent(n, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            cross_section,
            alphas,
        })
    }

    pub fn dimension(&self) -> T {
        self.n
    }

    pub fn cross_section(&self) -> &CrossSection<T> {
        &self.cross_section
    }

    pub fn alphas(&self) -> &[T] {
        &self.alphas
    }

    pub fn alpha(&self, i: usize) -> Option<T> {
        self.alphas.get(i).copied()
    }

    /// Leading nonconstant exponent `α₁`.
    pub fn alpha1(&self) -> Result<T> {
        self.alpha(1)
            .ok_or_else(|| Error::Structure("cross-section lists no nonconstant eigenvalue".into()))
    }

    pub fn obata(&self) -> Result<ObataCheck<T>> {
        obata_check(&self.cross_section, self.n)
    }

    /// Measure of the ball of radius `R` about the vertex: `R^N m(X) / N`.
    pub fn ball_volume(&self, radius: T) -> T {
        radius.powf(self.n) * self.cross_section.mass / self.n
    }
}

/// Bishop–Gromov density of the cone vertex, `m(X)/N`.
pub fn bg_density<T: Scalar>(cone: &ConeSpec<T>) -> T {
    cone.cross_section.mass / cone.n
}

/// `π − diam(X)`; the cone is sharp exactly when this is positive.
pub fn sharpness_gap<T: Scalar>(cs: &CrossSection<T>) -> T {
    T::PI() - cs.diameter
}

pub fn is_sharp<T: Scalar>(cs: &CrossSection<T>) -> bool {
    sharpness_gap(cs) > T::zero()
}

/// Truncated expansion `u = Σ a_i r^{α_i} φ_i` on the unit ball of a cone.
///
/// Only nonconstant modes (`i ≥ 1`) are stored; the constant mode carries
/// no gradient energy. The tail beyond `truncation_order` is the caller's
/// responsibility.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicExpansion<T> {
    cone: ConeSpec<T>,
    coefficients: Vec<(usize, T)>,
    truncation_order: usize,
}

impl<T: Scalar> HarmonicExpansion<T> {
    pub fn new(cone: ConeSpec<T>, coefficients: Vec<(usize, T)>) -> Result<Self> {
        let order = coefficients.iter().map(|&(i, _)| i + 1).max().unwrap_or(1);
        Self::with_truncation(cone, coefficients, order)
    }

    pub fn with_truncation(
        cone: ConeSpec<T>,
        mut coefficients: Vec<(usize, T)>,
        truncation_order: usize,
    ) -> Result<Self> {
        let spectrum_len = cone.cross_section.len();
        let mut seen = BTreeSet::new();
        for &(i, a) in &coefficients {
            if i == 0 {
                return Err(Error::Structure(
                    "mode 0 (constant) cannot appear in a harmonic expansion".into(),
                ));
            }
            if i >= spectrum_len {
                return Err(Error::Structure(format!(
                    "mode {i} exceeds the listed spectrum ({spectrum_len} eigenvalues)"
                )));
            }
            if i >= truncation_order {
                return Err(Error::Structure(format!(
                    "mode {i} lies beyond the truncation order {truncation_order}"
                )));
            }
            if !seen.insert(i) {
                return Err(Error::Structure(format!("mode {i} listed twice")));
            }
            if !a.is_finite() {
                return Err(Error::domain(
                    "a_i",
                    a.as_f64(),
                    "coefficient must be finite",
                ));
            }
        }
        coefficients.sort_by_key(|&(i, _)| i);
        Ok(Self {
            cone,
            coefficients,
            truncation_order,
        })
    }

    /// Single mode `a · r^{α_i} φ_i`.
    pub fn single(cone: ConeSpec<T>, mode: usize, coefficient: T) -> Result<Self> {
        Self::new(cone, vec![(mode, coefficient)])
    }

    pub fn cone(&self) -> &ConeSpec<T> {
        &self.cone
    }

    pub fn coefficients(&self) -> &[(usize, T)] {
        &self.coefficients
    }

    pub fn truncation_order(&self) -> usize {
        self.truncation_order
    }

    pub fn is_trivial(&self) -> bool {
        self.coefficients.iter().all(|&(_, a)| a == T::zero())
    }

    /// Same modes with every coefficient multiplied by `c`.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            cone: self.cone.clone(),
            coefficients: self.coefficients.iter().map(|&(i, a)| (i, a * c)).collect(),
            truncation_order: self.truncation_order,
        }
    }

    fn mode_energy(&self, mode: usize, a: T, radius: T) -> T {
        let lambda = self.cone.cross_section.eigenvalues[mode];
        let alpha = self.cone.alphas[mode];
        let expo = T::lit(2.0) * alpha + self.cone.n - T::lit(2.0);
        a * a * (lambda + alpha * alpha) * radius.powf(expo) / expo
    }
}

fn check_radius<T: Scalar>(radius: T) -> Result<()> {
    if radius > T::zero() && radius <= T::one() {
        Ok(())
    } else {
        Err(Error::domain(
            "R",
            radius.as_f64(),
            "radius must lie in (0, 1]",
        ))
    }
}

fn require_admissible<T: Scalar>(cone: &ConeSpec<T>) -> Result<()> {
    let check = cone.obata()?;
    if check.passed {
        Ok(())
    } else {
        Err(Error::Inadmissible(format!(
            "λ₁ − (N − 1) = {} < 0",
            check.margin.as_f64()
        )))
    }
}

/// Dirichlet energy `∫_{B_R} |∇u|²` of an expansion:
/// `Σ a_i² (λ_i + α_i²) R^{2α_i+N−2} / (2α_i + N − 2)`.
pub fn ball_energy<T: Scalar>(exp: &HarmonicExpansion<T>, radius: T) -> Result<T> {
    check_radius(radius)?;
    require_admissible(&exp.cone)?;
    Ok(exp.coefficients.iter().fold(T::zero(), |acc, &(i, a)| {
        acc + exp.mode_energy(i, a, radius)
    }))
}

/// Mean energy `⨍_{B_R} |∇u|² = ball_energy · N / (m(X) R^N)`.
pub fn mean_ball_energy<T: Scalar>(exp: &HarmonicExpansion<T>, radius: T) -> Result<T> {
    let total = ball_energy(exp, radius)?;
    Ok(total / exp.cone.ball_volume(radius))
}

/// Energies of one function over a family of balls.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyProfile<T> {
    pub radii: Vec<T>,
    /// `∫_{B_R} |∇u|²`
    pub total_energy: Vec<T>,
    /// Ball measures `m(B_R)`.
    pub volume: Vec<T>,
    /// `⨍_{B_R} |∇u|²`
    pub mean_energy: Vec<T>,
}

impl<T: Scalar> EnergyProfile<T> {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayCheck<T> {
    pub profile: EnergyProfile<T>,
    /// `⨍_{B_1}|∇u|²`
    pub unit_mean: T,
    /// `2α₁ − 2`
    pub exponent: T,
    /// `⨍_{B_R} / (R^{2α₁−2} ⨍_{B_1})` per radius; at most 1 up to slack.
    pub ratios: Vec<T>,
    pub passed: bool,
}

/// Checks `⨍_{B_R}|∇u|² ≤ R^{2α₁−2} ⨍_{B_1}|∇u|²` at every radius.
pub fn decay_check<T: Scalar>(exp: &HarmonicExpansion<T>, radii: &[T]) -> Result<DecayCheck<T>> {
    if radii.is_empty() {
        return Err(Error::Structure(
            "decay check needs at least one radius".into(),
        ));
    }
    let unit_mean = mean_ball_energy(exp, T::one())?;
    let exponent = T::lit(2.0) * exp.cone.alpha1()? - T::lit(2.0);
    let slack = T::one() + T::lit(IDENTITY_RTOL);

    let mut profile = EnergyProfile {
        radii: Vec::with_capacity(radii.len()),
        total_energy: Vec::with_capacity(radii.len()),
        volume: Vec::with_capacity(radii.len()),
        mean_energy: Vec::with_capacity(radii.len()),
    };
    let mut ratios = Vec::with_capacity(radii.len());
    let mut passed = true;
    for &r in radii {
        let total = ball_energy(exp, r)?;
        let volume = exp.cone.ball_volume(r);
        let mean = total / volume;
        let bound = r.powf(exponent) * unit_mean;
        if mean > bound * slack {
            passed = false;
        }
        ratios.push(if bound > T::zero() {
            mean / bound
        } else {
            T::zero()
        });
        profile.radii.push(r);
        profile.total_energy.push(total);
        profile.volume.push(volume);
        profile.mean_energy.push(mean);
    }
    Ok(DecayCheck {
        profile,
        unit_mean,
        exponent,
        ratios,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contraction<T> {
    /// `⨍_{B_{1/2}} / ⨍_{B_1}`
    pub ratio: T,
    /// `1 − ratio`, the measured contraction constant.
    pub delta0: T,
    /// `(1/2)^{2α₁−2}`, the bound the ratio never exceeds.
    pub bound: T,
}

/// Halving contraction of the mean gradient energy of a cone harmonic.
pub fn contraction_check<T: Scalar>(exp: &HarmonicExpansion<T>) -> Result<Contraction<T>> {
    if exp.is_trivial() {
        return Err(Error::Degenerate(
            "all coefficients vanish; the energy ratio is 0/0".into(),
        ));
    }
    let half = T::lit(0.5);
    let ratio = mean_ball_energy(exp, half)? / mean_ball_energy(exp, T::one())?;
    let bound = half.powf(T::lit(2.0) * exp.cone.alpha1()? - T::lit(2.0));
    if ratio > bound * (T::one() + T::lit(IDENTITY_RTOL)) {
        return Err(Error::Solver(format!(
            "contraction ratio {} exceeds the closed-form bound {}",
            ratio.as_f64(),
            bound.as_f64()
        )));
    }
    Ok(Contraction {
        ratio,
        delta0: T::one() - ratio,
        bound,
    })
}

/// Dyadic recursion `E_{k+1} = (1−δ₀) E_k + C R_k^{2(p−N)/p}` with `R_k = R₀ 2^{−k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace<T> {
    pub energies: Vec<T>,
    pub radii: Vec<T>,
    pub delta0: T,
    pub forcing: T,
    pub p: T,
    pub n: T,
    pub r0: T,
}

impl<T: Scalar> IterationTrace<T> {
    /// `2(p − N)/p`
    pub fn forcing_exponent(&self) -> T {
        forcing_exponent(self.p, self.n)
    }

    /// Closed-form upper bound for `E_k`; see [`iteration_envelope`].
    pub fn envelope(&self, k: usize) -> T {
        iteration_envelope(
            self.energies[0],
            self.delta0,
            self.forcing,
            self.p,
            self.n,
            self.r0,
            k,
        )
    }

    /// First index from which every remaining entry of the trace stays below `threshold`.
    pub fn first_below(&self, threshold: T) -> Option<usize> {
        let last_above = self.energies.iter().rposition(|&e| e >= threshold);
        match last_above {
            None => Some(0),
            Some(k) if k + 1 < self.energies.len() => Some(k + 1),
            Some(_) => None,
        }
    }
}

fn forcing_exponent<T: Scalar>(p: T, n: T) -> T {
    T::lit(2.0) * (p - n) / p
}

/// Geometric-sum bound for the dyadic recursion.
///
/// With `q = 1 − δ₀` and `s = 2^{−σ}`, `σ = 2(p−N)/p`, the recursion solves to
/// `E_k = q^k E₀ + C R₀^σ Σ_{j<k} q^{k−1−j} s^j`, and the sum is at most
/// `k · max(q, s)^{k−1}`.
pub fn iteration_envelope<T: Scalar>(
    e0: T,
    delta0: T,
    forcing: T,
    p: T,
    n: T,
    r0: T,
    k: usize,
) -> T {
    let q = T::one() - delta0;
    let sigma = forcing_exponent(p, n);
    let s = T::lit(2.0).powf(-sigma);
    let kt = T::from_usize_lossy(k);
    let geometric = if k == 0 {
        T::zero()
    } else {
        kt * q.max(s).powf(kt - T::one())
    };
    q.powf(kt) * e0 + forcing * r0.powf(sigma) * geometric
}

/// Smallest `k` such that [`iteration_envelope`] stays below `threshold` for every `j ≥ k`.
pub fn predicted_steps<T: Scalar>(
    e0: T,
    delta0: T,
    forcing: T,
    p: T,
    n: T,
    r0: T,
    threshold: T,
) -> Result<usize> {
    validate_iteration(e0, delta0, forcing, p, n, r0)?;
    if !(threshold > T::zero()) {
        return Err(Error::domain(
            "threshold",
            threshold.as_f64(),
            "must be positive",
        ));
    }
    const LIMIT: usize = 50_000_000;
    let env = |k: usize| iteration_envelope(e0, delta0, forcing, p, n, r0, k);

    // k·m^{k−1} peaks at k = 1/ln(1/m); past that point the envelope decreases.
    let m = (T::one() - delta0).max(T::lit(2.0).powf(-forcing_exponent(p, n)));
    let peak = (T::one() / (T::one() / m).ln()).ceil().as_f64();
    if !(peak < LIMIT as f64) {
        return Err(Error::domain(
            "p",
            p.as_f64(),
            "forcing decays too slowly to reach the threshold",
        ));
    }
    let k0 = peak.max(0.0) as usize;

    let mut hi = k0;
    let mut stride = 1usize;
    while env(hi) >= threshold {
        hi += stride;
        stride = stride.saturating_mul(2);
        if hi > LIMIT {
            return Err(Error::domain(
                "p",
                p.as_f64(),
                "forcing decays too slowly to reach the threshold",
            ));
        }
    }
    // decreasing on [k0, ∞): bisect for the first index below the threshold
    let mut lo = if hi == k0 { k0 } else { hi - stride / 2 };
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if env(mid) < threshold {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let mut k = hi;
    if k == k0 {
        while k > 0 && env(k - 1) < threshold {
            k -= 1;
        }
    }
    Ok(k)
}

fn validate_iteration<T: Scalar>(e0: T, delta0: T, forcing: T, p: T, n: T, r0: T) -> Result<()> {
    if !(e0 >= T::zero()) || !e0.is_finite() {
        return Err(Error::domain("E0", e0.as_f64(), "must be finite and ≥ 0"));
    }
    if !(delta0 > T::zero() && delta0 < T::one()) {
        return Err(Error::domain(
            "delta0",
            delta0.as_f64(),
            "must lie in (0, 1)",
        ));
    }
    if !(forcing >= T::zero()) || !forcing.is_finite() {
        return Err(Error::domain(
            "C",
            forcing.as_f64(),
            "must be finite and ≥ 0",
        ));
    }
    if !(n >= T::lit(2.0)) || !n.is_finite() {
        return Err(Error::domain("N", n.as_f64(), "cone dimension must be ≥ 2"));
    }
    if !(p > n) || !p.is_finite() {
        return Err(Error::domain(
            "p",
            p.as_f64(),
            "must exceed N; otherwise the forcing R^{2(p−N)/p} does not vanish",
        ));
    }
    if !(r0 > T::zero()) || !r0.is_finite() {
        return Err(Error::domain("R0", r0.as_f64(), "must be positive"));
    }
    Ok(())
}

/// Runs the dyadic recursion for `kmax` steps (the trace has `kmax + 1` entries).
pub fn iterate_dyadic<T: Scalar>(
    e0: T,
    delta0: T,
    forcing: T,
    p: T,
    n: T,
    r0: T,
    kmax: usize,
) -> Result<IterationTrace<T>> {
    validate_iteration(e0, delta0, forcing, p, n, r0)?;
    let sigma = forcing_exponent(p, n);
    let q = T::one() - delta0;
    let half = T::lit(0.5);

    let mut energies = Vec::with_capacity(kmax + 1);
    let mut radii = Vec::with_capacity(kmax + 1);
    let mut e = e0;
    let mut r = r0;
    for _ in 0..kmax {
        energies.push(e);
        radii.push(r);
        e = q * e + forcing * r.powf(sigma);
        r = r * half;
    }
    energies.push(e);
    radii.push(r);
    Ok(IterationTrace {
        energies,
        radii,
        delta0,
        forcing,
        p,
        n,
        r0,
    })
}
