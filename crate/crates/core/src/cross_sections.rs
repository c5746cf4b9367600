//! Exact spectra of admissible cone bases.
//!
//! Multiplicities are expanded inline, so `spectral` never has to reason
//! about them: the circle of circumference `2πβ` lists `0, (1/β)², (1/β)²,
//! (2/β)², …` and the unit sphere `S^m` lists `k(k+m−1)` repeated by the
//! dimension of degree-`k` spherical harmonics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::CrossSection;

/// Circle of circumference `2πβ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleBase<T> {
    beta: T,
    override_fat: bool,
}

impl<T: Scalar> CircleBase<T> {
    pub fn new(beta: T) -> Result<Self> {
        if !(beta > T::zero() && beta <= T::one()) {
            return Err(Error::domain(
                "beta",
                beta.as_f64(),
                "must lie in (0, 1]; circles longer than 2π need the explicit override",
            ));
        }
        Ok(Self {
            beta,
            override_fat: false,
        })
    }

    /// Any positive `β`, including `β > 1`. Such bases violate `λ₁ ≥ 1` and
    /// exist only as negative controls for the admissibility checks.
    pub fn fat(beta: T) -> Result<Self> {
        if !(beta > T::zero()) || !beta.is_finite() {
            return Err(Error::domain("beta", beta.as_f64(), "must be positive"));
        }
        Ok(Self {
            beta,
            override_fat: true,
        })
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn diameter(&self) -> T {
        T::PI() * self.beta
    }

    pub fn mass(&self) -> T {
        T::lit(2.0) * T::PI() * self.beta
    }

    /// `(n/β)²`
    pub fn eigenvalue(&self, n: usize) -> T {
        let f = T::from_usize_lossy(n) / self.beta;
        f * f
    }

    /// Angular frequency `n` of the eigenvalue at list position `index`
    /// (positions `2n−1` and `2n` hold the cosine and sine modes).
    pub fn frequency_of(index: usize) -> usize {
        index.div_ceil(2)
    }

    pub fn spectrum(&self, count: usize) -> Result<CrossSection<T>> {
        if count < 2 {
            return Err(Error::domain(
                "count",
                count as f64,
                "need at least two eigenvalues",
            ));
        }
        let eigenvalues = (0..count)
            .map(|i| self.eigenvalue(Self::frequency_of(i)))
            .collect();
        let one = T::one();
        if self.override_fat {
            CrossSection::new_unrestricted(eigenvalues, self.diameter(), self.mass(), one)
        } else {
            CrossSection::new(eigenvalues, self.diameter(), self.mass(), one)
        }
    }
}

/// First `count` eigenvalues (with multiplicity) of the circle of circumference `2πβ`, `0 < β ≤ 1`.
pub fn circle_spectrum<T: Scalar>(beta: T, count: usize) -> Result<CrossSection<T>> {
    CircleBase::new(beta)?.spectrum(count)
}

/// Unit round sphere `S^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphereBase {
    m: u32,
}

impl SphereBase {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("m", 0.0, "sphere dimension must be ≥ 1"));
        }
        Ok(Self { m })
    }

    pub fn dimension(&self) -> u32 {
        self.m
    }

    /// `k(k + m − 1)`
    pub fn eigenvalue<T: Scalar>(&self, k: u64) -> T {
        T::from_u64(k * (k + self.m as u64 - 1)).expect("eigenvalue fits in a float")
    }

    /// `(2k+m−1)(k+m−2)! / (k!(m−1)!)`, with multiplicity 1 for `k = 0`.
    pub fn multiplicity(&self, k: u64) -> u128 {
        if k == 0 {
            return 1;
        }
        let m = self.m as u64;
        // (2k+m−1)·(k+m−2)!/(k!(m−1)!) = (2k+m−1)·C(k+m−2, k−1)/k, exact in integers
        let c = binomial(k + m - 2, k - 1);
        (2 * k + m - 1) as u128 * c / k as u128
    }

    /// Volume `2π^{(m+1)/2} / Γ((m+1)/2)`.
    pub fn mass<T: Scalar>(&self) -> T {
        let half = (self.m + 1) as usize; // Γ(half/2)
        let gamma = gamma_half_integer::<T>(half);
        T::lit(2.0) * T::PI().powf(T::from_usize_lossy(half) / T::lit(2.0)) / gamma
    }

    pub fn spectrum<T: Scalar>(&self, count: usize) -> Result<CrossSection<T>> {
        if count < 2 {
            return Err(Error::domain(
                "count",
                count as f64,
                "need at least two eigenvalues",
            ));
        }
        let mut eigenvalues = Vec::with_capacity(count);
        let mut k = 0u64;
        while eigenvalues.len() < count {
            let lambda = self.eigenvalue::<T>(k);
            let mult = self
                .multiplicity(k)
                .min((count - eigenvalues.len()) as u128) as usize;
            eigenvalues.extend(std::iter::repeat_n(lambda, mult));
            k += 1;
        }
        CrossSection::new(
            eigenvalues,
            T::PI(),
            self.mass(),
            T::from_u32(self.m).expect("small integer"),
        )
    }
}

pub fn sphere_spectrum<T: Scalar>(m: u32, count: usize) -> Result<CrossSection<T>> {
    SphereBase::new(m)?.spectrum(count)
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `Γ(j/2)` for a positive integer `j`.
fn gamma_half_integer<T: Scalar>(j: usize) -> T {
    if j % 2 == 0 {
        // Γ(n) = (n−1)!
        (1..j / 2).fold(T::one(), |acc, i| acc * T::from_usize_lossy(i))
    } else {
        // Γ(n + 1/2) = √π · Π_{i=1}^{n} (i − 1/2)
        let n = j / 2;
        (1..=n).fold(T::PI().sqrt(), |acc, i| {
            acc * (T::from_usize_lossy(i) - T::lit(0.5))
        })
    }
}

/// On-disk form of a cross-section spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumDocument {
    pub eigenvalues: Vec<f64>,
    pub diameter: f64,
    pub mass: f64,
    pub base_dimension: f64,
}

impl<T: Scalar> From<&CrossSection<T>> for SpectrumDocument {
    fn from(cs: &CrossSection<T>) -> Self {
        Self {
            eigenvalues: cs.eigenvalues().iter().map(|l| l.as_f64()).collect(),
            diameter: cs.diameter().as_f64(),
            mass: cs.mass().as_f64(),
            base_dimension: cs.base_dimension().as_f64(),
        }
    }
}

/// Parses and validates a JSON spectrum document.
///
/// Admissibility (`λ₁ ≥ N − 1`) depends on the cone dimension and is left
/// to consumers; only the structural invariants are enforced here.
pub fn load_spectrum<T: Scalar>(document: &str) -> Result<CrossSection<T>> {
    let doc: SpectrumDocument = serde_json::from_str(document).map_err(|e| {
        let msg = e.to_string();
        Error::Parse {
            field: backticked(&msg).unwrap_or_else(|| "<document>".into()),
            message: msg,
            line: Some(e.line()),
            column: Some(e.column()),
        }
    })?;
    validate_document(&doc)?;
    let conv = |x: f64| T::from_f64(x).expect("finite value");
    CrossSection::new(
        doc.eigenvalues.iter().copied().map(conv).collect(),
        conv(doc.diameter),
        conv(doc.mass),
        conv(doc.base_dimension),
    )
    .map_err(|e| match e {
        Error::Domain { name, reason, .. } => parse_error(name, reason),
        other => other,
    })
}

/// Pretty JSON form accepted by [`load_spectrum`].
pub fn spectrum_to_json<T: Scalar>(cs: &CrossSection<T>) -> String {
    serde_json::to_string_pretty(&SpectrumDocument::from(cs)).expect("plain data serializes")
}

fn parse_error(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        field: field.into(),
        message: message.into(),
        line: None,
        column: None,
    }
}

fn validate_document(doc: &SpectrumDocument) -> Result<()> {
    if doc.eigenvalues.is_empty() {
        return Err(parse_error(
            "eigenvalues",
            "must list at least the eigenvalue 0",
        ));
    }
    for (i, &l) in doc.eigenvalues.iter().enumerate() {
        if !l.is_finite() || l < 0.0 {
            return Err(parse_error(
                format!("eigenvalues[{i}]"),
                format!("{l} is negative or not finite"),
            ));
        }
        if i == 0 && l != 0.0 {
            return Err(parse_error(
                "eigenvalues[0]",
                format!("first eigenvalue must be 0, got {l}"),
            ));
        }
        if i > 0 && l < doc.eigenvalues[i - 1] {
            return Err(parse_error(
                format!("eigenvalues[{i}]"),
                format!(
                    "{l} is smaller than the preceding {}; the list must be sorted",
                    doc.eigenvalues[i - 1]
                ),
            ));
        }
    }
    if !(doc.diameter > 0.0 && doc.diameter <= std::f64::consts::PI * (1.0 + 4.0 * f64::EPSILON)) {
        return Err(parse_error(
            "diameter",
            format!("{} is outside (0, π]", doc.diameter),
        ));
    }
    if !(doc.mass > 0.0) || !doc.mass.is_finite() {
        return Err(parse_error(
            "mass",
            format!("{} is not a positive number", doc.mass),
        ));
    }
    if !(doc.base_dimension >= 0.0) || !doc.base_dimension.is_finite() {
        return Err(parse_error(
            "base_dimension",
            format!("{} is not a nonnegative number", doc.base_dimension),
        ));
    }
    Ok(())
}

pub(crate) fn backticked(msg: &str) -> Option<String> {
    let start = msg.find('`')? + 1;
    let len = msg[start..].find('`')?;
    Some(msg[start..start + len].to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::obata_check;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_examples() {
        let cs = circle_spectrum(0.5, 3).unwrap();
        assert_eq!(cs.eigenvalues(), &[0.0, 4.0, 4.0]);
        assert_relative_eq!(cs.diameter(), PI / 2.0);
        assert_relative_eq!(cs.mass(), PI);

        assert_eq!(
            circle_spectrum(1.0, 3).unwrap().eigenvalues(),
            &[0.0, 1.0, 1.0]
        );

        let cs = circle_spectrum(2.0 / 3.0, 5).unwrap();
        let expected = [0.0, 2.25, 2.25, 9.0, 9.0];
        for (a, b) in cs.eigenvalues().iter().zip(expected) {
            assert_relative_eq!(*a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn circle_rejects_fat_without_override() {
        assert!(circle_spectrum(1.2, 3).is_err());
        assert!(circle_spectrum(0.0, 3).is_err());
        assert!(circle_spectrum(0.5, 1).is_err());
        let fat = CircleBase::fat(1.2).unwrap().spectrum(3).unwrap();
        assert!(fat.diameter() > PI);
    }

    #[test]
    fn sphere_examples() {
        let s = sphere_spectrum::<f64>(2, 4).unwrap();
        assert_eq!(s.eigenvalues(), &[0.0, 2.0, 2.0, 2.0]);
        assert_relative_eq!(s.mass(), 4.0 * PI, epsilon = 1e-14);

        let s3 = SphereBase::new(3).unwrap();
        assert_eq!(s3.multiplicity(1), 4);
        assert_eq!(s3.eigenvalue::<f64>(1), 3.0);
        assert_relative_eq!(s3.mass::<f64>(), 2.0 * PI * PI, epsilon = 1e-14);
    }

    #[test]
    fn sphere_one_is_unit_circle() {
        for count in [2, 3, 7, 12] {
            assert_eq!(
                sphere_spectrum::<f64>(1, count).unwrap(),
                circle_spectrum(1.0, count).unwrap()
            );
        }
    }

    /// Dimension of homogeneous polynomials of degree k in d variables.
    fn monomials(d: usize, k: usize) -> u128 {
        fn count(d: usize, k: usize) -> u128 {
            if d == 1 {
                return 1;
            }
            (0..=k).map(|j| count(d - 1, k - j)).sum()
        }
        count(d, k)
    }

    #[test]
    fn sphere_multiplicity_matches_harmonic_polynomial_count() {
        // harmonic polynomials of degree k on R^{m+1}: P_k − P_{k−2}
        for m in 1..=3u32 {
            let s = SphereBase::new(m).unwrap();
            for k in 0..=5usize {
                let d = m as usize + 1;
                let brute = monomials(d, k) - if k >= 2 { monomials(d, k - 2) } else { 0 };
                assert_eq!(s.multiplicity(k as u64), brute, "m = {m}, k = {k}");
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let cs = circle_spectrum(0.5, 5).unwrap();
        let back: CrossSection<f64> = load_spectrum(&spectrum_to_json(&cs)).unwrap();
        assert_eq!(back, cs);
    }

    #[test]
    fn json_low_gap_fails_admissibility_downstream() {
        let doc = r#"{"eigenvalues": [0, 0.5], "diameter": 1.0, "mass": 2.0, "base_dimension": 1}"#;
        let cs: CrossSection<f64> = load_spectrum(doc).unwrap();
        assert!(!obata_check(&cs, 2.0).unwrap().passed);
    }

    #[test]
    fn json_missing_mass() {
        let doc = r#"{"eigenvalues": [0, 4], "diameter": 1.0, "base_dimension": 1}"#;
        match load_spectrum::<f64>(doc) {
            Err(Error::Parse { field, line, .. }) => {
                assert_eq!(field, "mass");
                assert!(line.is_some());
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn json_field_errors() {
        let cases = [
            (
                r#"{"eigenvalues": [0, 4, 3], "diameter": 1, "mass": 1, "base_dimension": 1}"#,
                "eigenvalues[2]",
            ),
            (
                r#"{"eigenvalues": [0, -4], "diameter": 1, "mass": 1, "base_dimension": 1}"#,
                "eigenvalues[1]",
            ),
            (
                r#"{"eigenvalues": [1, 4], "diameter": 1, "mass": 1, "base_dimension": 1}"#,
                "eigenvalues[0]",
            ),
            (
                r#"{"eigenvalues": [0, 4], "diameter": 4, "mass": 1, "base_dimension": 1}"#,
                "diameter",
            ),
            (
                r#"{"eigenvalues": [0, 4], "diameter": 1, "mass": 0, "base_dimension": 1}"#,
                "mass",
            ),
            (
                r#"{"eigenvalues": [0, 4], "diameter": 1, "mass": 1, "base_dimension": -1}"#,
                "base_dimension",
            ),
            (
                r#"{"eigenvalues": [0, 4], "diameter": 1, "mass": 1, "base_dimension": 1, "x": 2}"#,
                "x",
            ),
        ];
        for (doc, field) in cases {
            match load_spectrum::<f64>(doc) {
                Err(Error::Parse { field: f, .. }) => assert_eq!(f, field, "{doc}"),
                other => panic!("{doc}: expected parse error, got {other:?}"),
            }
        }
    }

    proptest! {
        #[test]
        fn circle_obata_margin(beta in 1e-3f64..=1.0) {
            let cs = circle_spectrum(beta, 3).unwrap();
            let c = obata_check(&cs, 2.0).unwrap();
            prop_assert!(c.passed);
            let expected = 1.0 / (beta * beta) - 1.0;
            prop_assert!((c.margin - expected).abs() <= 1e-12 * (1.0 + expected));
        }

        #[test]
        fn spectra_are_sorted(beta in 1e-2f64..=1.0, m in 1u32..6, count in 2usize..40) {
            for cs in [circle_spectrum(beta, count).unwrap(), sphere_spectrum(m, count).unwrap()] {
                prop_assert_eq!(cs.len(), count);
                prop_assert!(cs.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }
}
