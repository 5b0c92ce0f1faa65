use rayon::prelude::*;

use super::symbol::{part_operator_polar, ModeOperator, Part};
use crate::spectral::{SpectralState, WavenumberLattice};
use crate::{Error, Result, ViscosityParams};

/// Per-mode operators of one symbol part on a lattice.
pub fn mode_operators(
    t: f64,
    params: &ViscosityParams,
    part: Part,
    lattice: &WavenumberLattice,
) -> Result<Vec<ModeOperator>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("propagator time must be finite and non-negative, got {t}")));
    }
    Ok((0..lattice.len())
        .into_par_iter()
        .map(|idx| {
            let (r, dir) = lattice.symbol_coordinates(idx);
            part_operator_polar(t, r, dir, params, part)
        })
        .collect())
}

/// Applies precomputed per-mode operators.
pub fn apply_operators(ops: &[ModeOperator], state: &SpectralState) -> Result<SpectralState> {
    if ops.len() != state.len() {
        return Err(Error::Shape { expected: state.len(), found: ops.len() });
    }
    let [c0, c1, c2, c3] = &state.coeffs;
    let mapped: Vec<[crate::C64; 4]> =
        ops.par_iter().enumerate().map(|(idx, op)| op.apply([c0[idx], c1[idx], c2[idx], c3[idx]])).collect();
    let mut out = SpectralState::zeros(state.len());
    for (idx, v) in mapped.into_iter().enumerate() {
        for c in 0..4 {
            out.coeffs[c][idx] = v[c];
        }
    }
    Ok(out)
}

/// `Ĝ_part(t)·V̂` mode by mode.
pub fn apply_propagator(
    state: &SpectralState,
    t: f64,
    params: &ViscosityParams,
    part: Part,
    lattice: &WavenumberLattice,
) -> Result<SpectralState> {
    state.check_shape(lattice)?;
    let ops = mode_operators(t, params, part, lattice)?;
    apply_operators(&ops, state)
}
