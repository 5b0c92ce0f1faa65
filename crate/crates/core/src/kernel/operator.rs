use crate::green::{apply_operators, mode_operators, Part};
use crate::spectral::{random_band_state, to_spectral, LpExponent, WavenumberLattice};
use crate::{Result, ViscosityParams};

use super::NormSeries;

/// Amplification `‖G_part(t)∗f‖_{L²}/‖f‖_{L²}` of seeded band-limited fields.
///
/// Returns one series per field (seeds `seed, seed + 1, …`), labelled
/// `"{part}_op_{i}"`. The propagator is built once per time and applied to
/// every field.
pub fn operator_amplification(
    part: Part,
    times: &[f64],
    params: &ViscosityParams,
    lattice: &WavenumberLattice,
    band: [f64; 2],
    fields: usize,
    seed: u64,
) -> Result<Vec<NormSeries>> {
    let specs = (0..fields as u64)
        .map(|i| to_spectral(&random_band_state(lattice, band, 1.0, seed + i)?, lattice))
        .collect::<Result<Vec<_>>>()?;
    let norms: Vec<f64> = specs.iter().map(|s| s.coefficient_norm()).collect();
    let mut series: Vec<NormSeries> =
        (0..fields).map(|i| NormSeries::empty(format!("{}_op_{i}", part.short_name()), LpExponent::Two, 0)).collect();
    for &t in times {
        let ops = mode_operators(t, params, part, lattice)?;
        for ((s, spec), n0) in series.iter_mut().zip(&specs).zip(&norms) {
            s.push(t, apply_operators(&ops, spec)?.coefficient_norm() / n0)?;
        }
    }
    Ok(series)
}
