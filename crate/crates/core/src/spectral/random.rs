use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{forward_field, inverse_field, PhysicalState, WavenumberLattice};
use crate::{Error, Result};

/// Seeded random state with every component band-limited to
/// `lo ≤ |ξ| ≤ hi` and scaled to `‖V‖_{L²} = l2`.
///
/// White noise is filtered in Fourier space, so the coefficients are
/// Hermitian by construction.
pub fn random_band_state(lattice: &WavenumberLattice, band: [f64; 2], l2: f64, seed: u64) -> Result<PhysicalState> {
    let [lo, hi] = band;
    if !(lo >= 0.0 && hi > lo) {
        return Err(Error::config(format!("band [{lo}, {hi}] is empty")));
    }
    if hi > lattice.nyquist() {
        return Err(Error::config(format!("band edge {hi} exceeds the Nyquist wavenumber {}", lattice.nyquist())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fields: [Vec<f64>; 4] = Default::default();
    for f in fields.iter_mut() {
        let noise: Vec<f64> = (0..lattice.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut spec = forward_field(&noise, lattice);
        for (idx, c) in spec.iter_mut().enumerate() {
            let xi = lattice.wavevector(idx);
            let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
            if !(r >= lo && r <= hi) {
                *c = 0.0.into();
            }
        }
        *f = inverse_field(&spec, lattice);
    }
    let norm = (lattice.cell_volume() * fields.iter().flatten().map(|v| v * v).sum::<f64>()).sqrt();
    if norm == 0.0 {
        return Err(Error::config(format!("band [{lo}, {hi}] contains no lattice modes")));
    }
    let [rho, u1, u2, u3] = fields.map(|f| f.into_iter().map(|v| v * l2 / norm).collect());
    Ok(PhysicalState { rho, velocity: [u1, u2, u3] })
}
