//! Harmonic functions on metric cones and on smoothed cone surfaces.
//!
//! * [`spectral`]: closed-form energies, decay and contraction on cones
//!   `Con(X)` built from a cross-section spectrum.
//! * [`cross_sections`]: circle and round-sphere spectra, plus a JSON loader.
//! * [`revolution`]: modes `h(r) cos kθ` on surfaces `dr² + φ(r)² dθ²`,
//!   with gradient, Hessian and `L^p` quadrature.
//! * [`experiments`]: ε-sweeps, decay and iteration experiments with
//!   power-law fits.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below name the common `f64` instantiations.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cross_sections;
pub mod error;
pub mod experiments;
pub mod revolution;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type CrossSectionF64 = spectral::CrossSection<f64>;
pub type ConeSpecF64 = spectral::ConeSpec<f64>;
pub type HarmonicExpansionF64 = spectral::HarmonicExpansion<f64>;
pub type ProfileF64 = revolution::ProfileFunction<f64>;
pub type ModeSolutionF64 = revolution::ModeSolution<f64>;

pub type CrossSectionF32 = spectral::CrossSection<f32>;
pub type ConeSpecF32 = spectral::ConeSpec<f32>;
pub type HarmonicExpansionF32 = spectral::HarmonicExpansion<f32>;
pub type ProfileF32 = revolution::ProfileFunction<f32>;
pub type ModeSolutionF32 = revolution::ModeSolution<f32>;
