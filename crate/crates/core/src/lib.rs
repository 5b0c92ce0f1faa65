//! Spectral toolkit for the linearized 3-D compressible Navier–Stokes system
//! with density-dependent viscosities `μ(ρ) = μρ^α`, `λ(ρ) = λρ^α`.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: periodic wavenumber lattices, FFT transforms, derivative
//!   multipliers, two-thirds dealiasing and discrete `L^p` norms.
//! * [`green`]: the exact 4×4 Fourier symbol of the linear propagator, its
//!   low / high-regular / high-singular split, and a matrix-exponential oracle.
//! * [`kernel`]: norms of the propagator parts (radial quadrature and box
//!   FFT pipelines) and decay-exponent fitting.
//! * [`nonlinear`]: pointwise density coefficients and the pseudo-spectral
//!   right-hand side of the perturbation system.
//! * [`integrator`]: exponential (Duhamel) time stepping.
//! * [`diagnostics`]: norm sampling, threshold monitors and decay reports.
//! * [`experiment`]: configuration files, initial data and on-disk outputs
//!   shared by the command-line harness.

pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod green;
pub mod integrator;
pub mod kernel;
pub mod nonlinear;
pub mod params;
pub mod spectral;

pub use error::{Error, Result};
pub use params::ViscosityParams;

/// Complex scalar used for all spectral coefficients.
pub type C64 = num_complex::Complex64;

pub use green::{EigenPair, Part, PropagatorMatrix};
pub use kernel::{DecayFit, DecayModel, NormSeries};

pub use spectral::{LpExponent, PhysicalState, SpectralState, WavenumberLattice};
