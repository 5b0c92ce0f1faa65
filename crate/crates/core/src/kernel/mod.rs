//! Norms of the propagator parts and decay-exponent fitting.
//!
//! Two pipelines are provided. The radial pipeline integrates functionals of
//! the symbol over `ℝ³` in spherical coordinates (the symbol depends on `ξ`
//! only through `|ξ|` and `ξ'ξ'ᵀ`). The box pipeline samples the symbol on a
//! periodic lattice and measures physical-space kernels directly.

mod boxed;
mod evolve;
mod fit;
mod operator;
pub mod quadrature;
mod radial;
mod rows;

pub use boxed::{
    box_lattice_for, check_box_resolution, kernel_on_box, truncation_quality, BoxKernel, BOX_EXPONENTS, KERNEL_ENTRIES,
    MIN_TRUNCATION_QUALITY,
};
pub use evolve::{evolved_norm_radial, gaussian_bump_radial};
pub use fit::{fit_decay, fit_decay_bounded, DecayFit, DecayModel, FitBound, NormSeries, MIN_R_SQUARED};
pub use operator::operator_amplification;
pub use radial::{
    radial_frobenius_sqr, radial_integrand, symbol_norm_radial, symbol_sup_radial, RadialMode, RadialNorm,
    RadialOptions,
};
pub use rows::{write_norm_rows, NormRow, NORM_HEADER};
