//! Periodic pseudo-spectral machinery on the torus `[0, L)³`.
//!
//! Transform convention: `f̂(ξ) = n⁻³ Σₓ f(x) e^{-iξ·x}` so the zero mode is the
//! grid mean, and `f(x) = Σ_ξ f̂(ξ) e^{iξ·x}`.

mod fft;
mod lattice;
mod norms;
mod random;
pub mod reduce;
mod state;

pub use fft::Fft3;
pub use lattice::WavenumberLattice;
pub use norms::{gradient_tensor_fields, lp_norm, lp_norm_weighted, sobolev_seminorm, LpExponent};
pub use random::random_band_state;
pub use state::{
    dealias, dealias_field, forward_field, forward_pair, inverse_field, inverse_pair, resample, spectral_derivative,
    to_physical, to_spectral, PhysicalState, SpectralState,
};

pub(crate) use norms::seminorm_of;
pub(crate) use state::inverse_pair_from;
