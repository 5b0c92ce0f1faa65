//! Physical-space kernels of the propagator parts on a periodic box.

use rayon::prelude::*;
use serde::Serialize;

use super::radial::{integrate_radial, radial_integrand, RadialMode, RadialOptions};
use crate::green::{mode_operators, Part};
use crate::spectral::{inverse_pair, lp_norm_weighted, LpExponent, WavenumberLattice};
use crate::{Error, Result, ViscosityParams, C64};

/// Norms reported by [`kernel_on_box`].
pub const BOX_EXPONENTS: [LpExponent; 5] =
    [LpExponent::One, LpExponent::FourThirds, LpExponent::Two, LpExponent::Four, LpExponent::Infinity];

/// Minimum admissible truncation quality.
pub const MIN_TRUNCATION_QUALITY: f64 = 0.999;

/// Distinct entries `(row, col, multiplicity)` of the symmetric 4×4 kernel.
pub const KERNEL_ENTRIES: [(usize, usize, f64); 10] = [
    (0, 0, 1.0),
    (0, 1, 2.0),
    (0, 2, 2.0),
    (0, 3, 2.0),
    (1, 1, 1.0),
    (2, 2, 1.0),
    (3, 3, 1.0),
    (1, 2, 2.0),
    (1, 3, 2.0),
    (2, 3, 2.0),
];

#[derive(Debug, Clone, Serialize)]
pub struct BoxKernel {
    pub t: f64,
    pub part: Part,
    pub k: usize,
    /// physical kernel entries in [`KERNEL_ENTRIES`] order
    #[serde(skip)]
    pub fields: Vec<Vec<f64>>,
    pub norms: Vec<(LpExponent, f64)>,
    /// share of the symbol's radial `L¹` mass inside the Nyquist ball
    pub truncation_quality: f64,
}

impl BoxKernel {
    pub fn norm(&self, p: LpExponent) -> Option<f64> {
        self.norms.iter().find(|(q, _)| *q == p).map(|(_, v)| *v)
    }

    pub fn quality_ok(&self) -> bool {
        self.truncation_quality >= MIN_TRUNCATION_QUALITY
    }
}

/// Checks `L ≥ 20√(νt)` and `nπ/L ≥ 4`.
pub fn check_box_resolution(t: f64, lattice: &WavenumberLattice, params: &ViscosityParams) -> Result<()> {
    let need_l = 20.0 * (params.nu() * t).sqrt();
    if lattice.box_length() < need_l {
        return Err(Error::config(format!(
            "box too small: L ≥ 20·√(ν·t) requires L ≥ {need_l}, got L = {}",
            lattice.box_length()
        )));
    }
    if lattice.nyquist() < 4.0 {
        return Err(Error::config(format!("grid too coarse: n·π/L ≥ 4 fails (n·π/L = {})", lattice.nyquist())));
    }
    Ok(())
}

/// Smallest lattice with `2,3,5`-smooth even `n` meeting the box preconditions at `t`.
pub fn box_lattice_for(t: f64, params: &ViscosityParams) -> Result<WavenumberLattice> {
    let l = 20.0 * (params.nu() * t).sqrt() * (1.0 + 1e-12);
    let min_n = (4.0 * l / std::f64::consts::PI).ceil() as usize;
    let n = (min_n.max(WavenumberLattice::MIN_N)..=WavenumberLattice::MAX_N)
        .find(|&n| n % 2 == 0 && is_smooth(n))
        .ok_or_else(|| Error::config(format!("t = {t} needs n ≥ {min_n}, beyond the supported grid sizes")))?;
    WavenumberLattice::new(n, l)
}

fn is_smooth(mut n: usize) -> bool {
    for p in [2, 3, 5] {
        while n % p == 0 {
            n /= p;
        }
    }
    n == 1
}

/// Fraction of `∫ 4πr² r^k ‖M‖_F dr` that lies below `cutoff`.
pub fn truncation_quality(t: f64, part: Part, k: usize, cutoff: f64, params: &ViscosityParams) -> Result<f64> {
    let opts = RadialOptions::default();
    let f = |r: f64| radial_integrand(t, r, part, k, RadialMode::L1Symbol, params);
    let breaks = [0.5, 1.0, params.confluent_radius()];
    let total = integrate_radial(&f, &breaks, &opts)?;
    if total.value == 0.0 {
        return Ok(1.0);
    }
    if cutoff >= total.upper_limit {
        return Ok(1.0);
    }
    let inside = super::quadrature::integrate(&f, 0.0, cutoff, &breaks, opts.rel_tol, 0.0)?.0;
    Ok((inside / total.value).clamp(0.0, 1.0))
}

/// Samples the symbol part on the lattice, multiplies by `|ξ|^k` and
/// transforms back with the `1/L³` factor that approximates the inverse
/// Fourier integral on `ℝ³`.
pub fn kernel_on_box(
    t: f64,
    part: Part,
    k: usize,
    lattice: &WavenumberLattice,
    params: &ViscosityParams,
) -> Result<BoxKernel> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("box kernels need t > 0, got {t}")));
    }
    if k > 2 {
        return Err(Error::UnsupportedOrder(k));
    }
    check_box_resolution(t, lattice, params)?;
    let ops = mode_operators(t, params, part, lattice)?;
    let inv_vol = 1.0 / lattice.volume();
    let weight: Vec<f64> = (0..lattice.len())
        .into_par_iter()
        .map(|idx| lattice.symbol_coordinates(idx).0.powi(k as i32) * inv_vol)
        .collect();
    let spectrum = |entry: usize| -> Vec<C64> {
        let (a, b, _) = KERNEL_ENTRIES[entry];
        ops.par_iter()
            .zip(weight.par_iter())
            .map(|(op, &w)| {
                let d = op.dir;
                let eye = if a == b { 1.0 } else { 0.0 };
                let z = match (a, b) {
                    (0, 0) => op.long[0][0],
                    (0, j) => op.long[0][1] * d[j - 1],
                    (i, j) => {
                        let proj = d[i - 1] * d[j - 1];
                        op.trans * (eye - proj) + op.long[1][1] * proj
                    }
                };
                z * w
            })
            .collect()
    };
    let mut fields = Vec::with_capacity(KERNEL_ENTRIES.len());
    for pair in (0..KERNEL_ENTRIES.len()).collect::<Vec<_>>().chunks(2) {
        let (x, y) = inverse_pair(&spectrum(pair[0]), &spectrum(pair[1]), lattice);
        fields.push(x);
        fields.push(y);
    }
    drop(ops);
    let refs: Vec<&[f64]> = fields.iter().map(|f| f.as_slice()).collect();
    let weights: Vec<f64> = KERNEL_ENTRIES.iter().map(|e| e.2).collect();
    let norms = BOX_EXPONENTS
        .iter()
        .map(|&p| Ok((p, lp_norm_weighted(&refs, &weights, p, lattice)?)))
        .collect::<Result<Vec<_>>>()?;
    let truncation_quality = truncation_quality(t, part, k, lattice.nyquist(), params)?;
    Ok(BoxKernel { t, part, k, fields, norms, truncation_quality })
}
