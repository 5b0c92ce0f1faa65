use std::f64::consts::PI;

use rayon::prelude::*;

use super::Fft3;
use crate::{Error, Result};

/// Uniform `n³` grid on the periodic box `[0, L)³` together with its dual
/// wavenumber lattice.
///
/// Flat index `(i0 * n + i1) * n + i2`; axis 0 is `x₁`. Index `j` along an
/// axis carries the signed integer offset `ĵ = j` for `j < n/2` and `j - n`
/// otherwise, so `ĵ ∈ {-n/2, …, n/2 - 1}`.
#[derive(Debug, Clone)]
pub struct WavenumberLattice {
    n: usize,
    box_length: f64,
    wavenumbers: Vec<f64>,
    dealias_mask: Vec<bool>,
    fft: Fft3,
}

impl WavenumberLattice {
    pub const MIN_N: usize = 8;
    pub const MAX_N: usize = 512;

    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n % 2 != 0 {
            return Err(Error::config(format!("lattice size n must be even, got {n}")));
        }
        if !(Self::MIN_N..=Self::MAX_N).contains(&n) {
            return Err(Error::config(format!(
                "lattice size n must lie in [{}, {}], got {n}",
                Self::MIN_N,
                Self::MAX_N
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::config(format!("box length must be positive, got {box_length}")));
        }
        let dk = 2.0 * PI / box_length;
        let wavenumbers = (0..n).map(|j| dk * signed_offset(j, n) as f64).collect();
        // |ĵ| > n/3  ⇔  3|ĵ| > n
        let keep: Vec<bool> = (0..n).map(|j| 3 * signed_offset(j, n).unsigned_abs() as usize <= n).collect();
        let mut dealias_mask = Vec::with_capacity(n * n * n);
        for i0 in 0..n {
            for i1 in 0..n {
                for i2 in 0..n {
                    dealias_mask.push(keep[i0] && keep[i1] && keep[i2]);
                }
            }
        }
        Ok(WavenumberLattice { n, box_length, wavenumbers, dealias_mask, fft: Fft3::new(n) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Number of grid points (and of modes), `n³`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    pub fn cell_volume(&self) -> f64 {
        (self.box_length / self.n as f64).powi(3)
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Smallest positive wavenumber `2π/L`.
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Largest resolved radius `nπ/L`.
    pub fn nyquist(&self) -> f64 {
        self.n as f64 * PI / self.box_length
    }

    /// Per-axis wavenumbers `(2π/L)·ĵ`, indexed by array position.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.dealias_mask
    }

    pub fn fft(&self) -> &Fft3 {
        &self.fft
    }

    pub fn unflatten(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn flatten(&self, ijk: [usize; 3]) -> usize {
        (ijk[0] * self.n + ijk[1]) * self.n + ijk[2]
    }

    /// Signed integer offsets `ĵ` of a flat index.
    pub fn offsets(&self, idx: usize) -> [i64; 3] {
        self.unflatten(idx).map(|j| signed_offset(j, self.n))
    }

    /// Flat index of the mode at the given signed offsets (taken modulo `n`).
    pub fn index_of_offsets(&self, off: [i64; 3]) -> usize {
        let n = self.n as i64;
        self.flatten(off.map(|o| o.rem_euclid(n) as usize))
    }

    /// Flat index of the mode `-ξ`.
    pub fn negated(&self, idx: usize) -> usize {
        let [a, b, c] = self.unflatten(idx);
        let n = self.n;
        self.flatten([(n - a) % n, (n - b) % n, (n - c) % n])
    }

    /// Wave vector `(2π/L)·ĵ` exactly as laid out on the lattice.
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        self.unflatten(idx).map(|j| self.wavenumbers[j])
    }

    /// Wave vector used by every spectral operator.
    ///
    /// Components on a Nyquist plane (`ĵ = -n/2`) are mapped to zero: that
    /// mode is its own mirror image, and only a zero odd multiplier keeps
    /// real fields real there.
    pub fn effective_wavevector(&self, idx: usize) -> [f64; 3] {
        let half = self.n / 2;
        self.unflatten(idx).map(|j| if j == half { 0.0 } else { self.wavenumbers[j] })
    }

    /// `(|ξ|, ξ')` at which symbols are evaluated.
    ///
    /// The magnitude is that of the true wave vector, so Nyquist modes are
    /// damped at their real frequency. The direction comes from the effective
    /// wave vector (zero when that vanishes), which keeps odd entries zero on
    /// the self-mirrored Nyquist planes.
    pub fn symbol_coordinates(&self, idx: usize) -> (f64, [f64; 3]) {
        let k = self.wavevector(idx);
        let r = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        let e = self.effective_wavevector(idx);
        let m = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
        let dir = if m == 0.0 { [0.0; 3] } else { [e[0] / m, e[1] / m, e[2] / m] };
        (r, dir)
    }

    /// `f(idx, effective_wavevector(idx))` for every mode, in index order.
    ///
    /// Walks the lattice row by row, so the wave vector costs no divisions.
    pub fn map_modes<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send + Default + Clone,
        F: Fn(usize, [f64; 3]) -> T + Sync,
    {
        let n = self.n;
        let half = n / 2;
        let eff: Vec<f64> = (0..n).map(|j| if j == half { 0.0 } else { self.wavenumbers[j] }).collect();
        let mut out = vec![T::default(); n * n * n];
        out.par_chunks_mut(n).enumerate().for_each(|(row, chunk)| {
            let (k0, k1) = (eff[row / n], eff[row % n]);
            for (j, slot) in chunk.iter_mut().enumerate() {
                *slot = f(row * n + j, [k0, k1, eff[j]]);
            }
        });
        out
    }

    /// Physical coordinate of grid index `j` along any axis.
    pub fn coordinate(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        self.unflatten(idx).map(|j| self.coordinate(j))
    }
}

pub(crate) fn signed_offset(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_spacing_on_two_pi_box() {
        let lat = WavenumberLattice::new(8, 2.0 * PI).unwrap();
        let mut ks: Vec<f64> = lat.wavenumbers().to_vec();
        ks.sort_by(f64::total_cmp);
        assert_eq!(ks, vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn smallest_positive_wavenumber() {
        let lat = WavenumberLattice::new(8, 4.0 * PI).unwrap();
        let min_pos = lat.wavenumbers().iter().copied().filter(|&k| k > 0.0).fold(f64::INFINITY, f64::min);
        assert_eq!(min_pos, 0.5);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(WavenumberLattice::new(7, 1.0), Err(Error::Config(_))));
        assert!(matches!(WavenumberLattice::new(6, 1.0), Err(Error::Config(_))));
        assert!(matches!(WavenumberLattice::new(514, 1.0), Err(Error::Config(_))));
        assert!(matches!(WavenumberLattice::new(8, 0.0), Err(Error::Config(_))));
        assert!(matches!(WavenumberLattice::new(8, -1.0), Err(Error::Config(_))));
    }

    #[test]
    fn dealias_mask_matches_two_thirds_rule() {
        let lat = WavenumberLattice::new(12, 1.0).unwrap();
        for idx in 0..lat.len() {
            let off = lat.offsets(idx);
            let expected = off.iter().all(|o| 3 * o.unsigned_abs() as usize <= 12);
            assert_eq!(lat.dealias_mask()[idx], expected, "offsets {off:?}");
        }
    }

    #[test]
    fn negation_is_an_involution() {
        let lat = WavenumberLattice::new(8, 1.0).unwrap();
        for idx in 0..lat.len() {
            let neg = lat.negated(idx);
            assert_eq!(lat.negated(neg), idx);
            let (a, b) = (lat.effective_wavevector(idx), lat.effective_wavevector(neg));
            for d in 0..3 {
                assert_eq!(a[d], -b[d]);
            }
        }
    }
}
