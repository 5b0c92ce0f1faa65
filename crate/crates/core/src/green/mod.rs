//! Exact Fourier symbol of the linear propagator `e^{−tL}` for the
//! perturbation variables `V = (ϱ, u)`.
//!
//! Per mode, `L̂(ξ) = [[0, iξᵀ], [iξ, μ|ξ|²I + (μ+λ)ξξᵀ]]`. The longitudinal
//! pair `(ϱ̂, ξ'·û)` obeys a damped wave equation with roots
//! `λ± = −ν|ξ|²/2 ± √(ν²|ξ|⁴/4 − |ξ|²)`; the transverse velocity is a heat
//! flow with rate `μ|ξ|²`.

mod apply;
mod check;
mod eigen;
mod oracle;
mod symbol;

pub use apply::{apply_operators, apply_propagator, mode_operators};
pub use check::{random_params, sampling_plan, symbol_check, SymbolCheckReport, SymbolSample};
pub use eigen::{eigenvalues, stable_entries, EigenPair, StableEntries};
pub use oracle::{expm, expm_oracle, generator};
pub use symbol::{cutoff_chi, symbol, symbol_part, symbol_parts, ModeOperator, Part, PropagatorMatrix};

pub(crate) use symbol::{part_operator_polar, radial_parts};
