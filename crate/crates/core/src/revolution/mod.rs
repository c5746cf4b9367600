//! Harmonic modes on surfaces of revolution `dr² + φ(r)² dθ²`.

mod fields;
mod frobenius;
mod integrator;
mod mode;
mod norms;
mod profile;
mod quadrature;

pub use fields::{gradient_modulus, hessian, hessian_norm, hessian_trace, Hessian};
pub use frobenius::FrobeniusSeries;
pub use integrator::{integrate, IntegrationStats, StepControl};
pub use mode::{
    scaled_residual, solve_mode, solve_mode_with, ModeSample, ModeSolution, ModeValue, SolveOptions,
};
pub use norms::{lp_estimate, lp_norm, w12_norm, Field, LpEstimate, LpOptions};
pub use profile::{gauss_curvature, ProfileFunction, ProfileKind};
pub use quadrature::GaussLegendre;
