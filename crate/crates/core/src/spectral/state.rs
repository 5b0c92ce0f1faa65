use rayon::prelude::*;

use super::WavenumberLattice;
use crate::{Error, Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Density perturbation `ϱ` and velocity `u` sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalState {
    pub rho: Vec<f64>,
    pub velocity: [Vec<f64>; 3],
}

impl PhysicalState {
    pub fn zeros(len: usize) -> Self {
        PhysicalState { rho: vec![0.0; len], velocity: [vec![0.0; len], vec![0.0; len], vec![0.0; len]] }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// Components in the order `(ϱ, u₁, u₂, u₃)`.
    pub fn components(&self) -> [&[f64]; 4] {
        [&self.rho, &self.velocity[0], &self.velocity[1], &self.velocity[2]]
    }

    pub fn check_shape(&self, lattice: &WavenumberLattice) -> Result<()> {
        for c in self.components() {
            if c.len() != lattice.len() {
                return Err(Error::Shape { expected: lattice.len(), found: c.len() });
            }
        }
        Ok(())
    }

    pub fn all_finite(&self) -> bool {
        self.components().iter().all(|c| c.iter().all(|v| v.is_finite()))
    }

    /// `min(1 + ϱ)` over the grid.
    pub fn min_density(&self) -> f64 {
        self.rho.iter().fold(f64::INFINITY, |m, &r| m.min(1.0 + r))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let sc = |v: &Vec<f64>| v.iter().map(|x| s * x).collect::<Vec<_>>();
        PhysicalState {
            rho: sc(&self.rho),
            velocity: [sc(&self.velocity[0]), sc(&self.velocity[1]), sc(&self.velocity[2])],
        }
    }
}

/// Fourier coefficients `(ϱ̂, û₁, û₂, û₃)` indexed by lattice mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    pub coeffs: [Vec<C64>; 4],
}

impl SpectralState {
    pub fn zeros(len: usize) -> Self {
        SpectralState { coeffs: [vec![ZERO; len], vec![ZERO; len], vec![ZERO; len], vec![ZERO; len]] }
    }

    pub fn len(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs[0].is_empty()
    }

    pub fn check_shape(&self, lattice: &WavenumberLattice) -> Result<()> {
        for c in &self.coeffs {
            if c.len() != lattice.len() {
                return Err(Error::Shape { expected: lattice.len(), found: c.len() });
            }
        }
        Ok(())
    }

    /// The four coefficients of one mode.
    #[inline]
    pub fn mode(&self, idx: usize) -> [C64; 4] {
        [self.coeffs[0][idx], self.coeffs[1][idx], self.coeffs[2][idx], self.coeffs[3][idx]]
    }

    /// Largest violation of `coeff(-ξ) = conj(coeff(ξ))` over all components.
    pub fn hermitian_defect(&self, lattice: &WavenumberLattice) -> f64 {
        let mut worst = 0.0f64;
        for c in &self.coeffs {
            for idx in 0..c.len() {
                let d = (c[lattice.negated(idx)] - c[idx].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn all_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// Plain `ℓ²` norm of the coefficient vector (no volume factor).
    pub fn coefficient_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| super::reduce::sum_by(0, c.len(), &|i| c[i].norm_sqr())).sum();
        s.sqrt()
    }

    pub fn axpy(&mut self, a: f64, other: &SpectralState) {
        for (dst, src) in self.coeffs.iter_mut().zip(&other.coeffs) {
            dst.par_iter_mut().zip(src.par_iter()).for_each(|(d, s)| *d += s * a);
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            c.par_iter_mut().for_each(|z| *z *= s);
        }
        out
    }
}

/// Forward transform of one real field.
pub fn forward_field(field: &[f64], lattice: &WavenumberLattice) -> Vec<C64> {
    let mut buf: Vec<C64> = field.iter().map(|&x| C64::new(x, 0.0)).collect();
    lattice.fft().forward(&mut buf);
    let scale = 1.0 / lattice.len() as f64;
    buf.par_iter_mut().for_each(|z| *z *= scale);
    buf
}

/// Forward transform of two real fields with a single complex FFT.
pub fn forward_pair(a: &[f64], b: &[f64], lattice: &WavenumberLattice) -> (Vec<C64>, Vec<C64>) {
    let mut buf: Vec<C64> = a.par_iter().zip(b.par_iter()).map(|(&x, &y)| C64::new(x, y)).collect();
    lattice.fft().forward(&mut buf);
    let n = lattice.n();
    let scale = 0.5 / lattice.len() as f64;
    let zero = C64::new(0.0, 0.0);
    let (mut fa, mut fb) = (vec![zero; buf.len()], vec![zero; buf.len()]);
    let buf = &buf;
    fa.par_chunks_mut(n).zip(fb.par_chunks_mut(n)).enumerate().for_each(|(row, (ra, rb))| {
        // row of −ξ
        let mirror = ((n - row / n) % n * n + (n - row % n) % n) * n;
        for j in 0..n {
            let z = buf[row * n + j];
            let zn = buf[mirror + (n - j) % n].conj();
            ra[j] = (z + zn) * scale;
            rb[j] = (z - zn) * C64::new(0.0, -scale);
        }
    });
    (fa, fb)
}

/// Inverse transform of a Hermitian spectrum; the imaginary residue is dropped.
pub fn inverse_field(spec: &[C64], lattice: &WavenumberLattice) -> Vec<f64> {
    let mut buf = spec.to_vec();
    lattice.fft().inverse(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// Inverse transform of two Hermitian spectra with a single complex FFT.
pub fn inverse_pair(a: &[C64], b: &[C64], lattice: &WavenumberLattice) -> (Vec<f64>, Vec<f64>) {
    inverse_pair_from(lattice, |idx, _| (a[idx], b[idx]))
}

/// [`inverse_pair`] of two spectra generated mode by mode, which saves
/// materializing them (e.g. for derivatives).
pub(crate) fn inverse_pair_from<F>(lattice: &WavenumberLattice, f: F) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(usize, [f64; 3]) -> (C64, C64) + Sync,
{
    let mut buf = lattice.map_modes(|idx, xi| {
        let (x, y) = f(idx, xi);
        x + C64::new(-y.im, y.re)
    });
    lattice.fft().inverse(&mut buf);
    buf.into_iter().map(|z| (z.re, z.im)).unzip()
}

pub fn to_spectral(state: &PhysicalState, lattice: &WavenumberLattice) -> Result<SpectralState> {
    state.check_shape(lattice)?;
    let (r, u1) = forward_pair(&state.rho, &state.velocity[0], lattice);
    let (u2, u3) = forward_pair(&state.velocity[1], &state.velocity[2], lattice);
    Ok(SpectralState { coeffs: [r, u1, u2, u3] })
}

pub fn to_physical(spec: &SpectralState, lattice: &WavenumberLattice) -> Result<PhysicalState> {
    spec.check_shape(lattice)?;
    let (rho, u1) = inverse_pair(&spec.coeffs[0], &spec.coeffs[1], lattice);
    let (u2, u3) = inverse_pair(&spec.coeffs[2], &spec.coeffs[3], lattice);
    Ok(PhysicalState { rho, velocity: [u1, u2, u3] })
}

/// `(i ξ_axis)^k` applied to one component.
pub fn spectral_derivative(
    spec: &SpectralState,
    component: usize,
    axis: usize,
    order: usize,
    lattice: &WavenumberLattice,
) -> Result<Vec<C64>> {
    if order > 4 {
        return Err(Error::UnsupportedOrder(order));
    }
    if component >= 4 || axis >= 3 {
        return Err(Error::config(format!("component {component} / axis {axis} out of range")));
    }
    spec.check_shape(lattice)?;
    Ok(derivative_of(&spec.coeffs[component], &[axis; 4][..order], lattice))
}

/// Applies `∏ (i ξ_a)` over the listed axes.
pub(crate) fn derivative_of(field: &[C64], axes: &[usize], lattice: &WavenumberLattice) -> Vec<C64> {
    let i_pow = match axes.len() % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    };
    field
        .par_iter()
        .enumerate()
        .map(|(idx, &z)| {
            let xi = lattice.effective_wavevector(idx);
            let mult: f64 = axes.iter().map(|&a| xi[a]).product();
            z * i_pow * mult
        })
        .collect()
}

pub fn dealias_field(field: &mut [C64], lattice: &WavenumberLattice) {
    let mask = lattice.dealias_mask();
    field.par_iter_mut().zip(mask.par_iter()).for_each(|(z, &keep)| {
        if !keep {
            *z = ZERO;
        }
    });
}

pub fn dealias(spec: &SpectralState, lattice: &WavenumberLattice) -> SpectralState {
    let mut out = spec.clone();
    for c in out.coeffs.iter_mut() {
        dealias_field(c, lattice);
    }
    out
}

/// Moves a spectrum between lattices of the same box by zero padding or
/// truncation. Modes on the source Nyquist planes are dropped.
pub fn resample(field: &[C64], from: &WavenumberLattice, to: &WavenumberLattice) -> Result<Vec<C64>> {
    if (from.box_length() - to.box_length()).abs() > 1e-12 * from.box_length() {
        return Err(Error::config("resample requires identical box lengths"));
    }
    if field.len() != from.len() {
        return Err(Error::Shape { expected: from.len(), found: field.len() });
    }
    let mut out = vec![ZERO; to.len()];
    let limit = (from.n().min(to.n()) / 2) as i64;
    for (idx, &z) in field.iter().enumerate() {
        let off = from.offsets(idx);
        if off.iter().all(|o| o.abs() < limit) {
            out[to.index_of_offsets(off)] = z;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn lattice(n: usize, l: f64) -> WavenumberLattice {
        WavenumberLattice::new(n, l).unwrap()
    }

    fn field_from(lat: &WavenumberLattice, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
        (0..lat.len()).map(|i| f(lat.point(i))).collect()
    }

    fn random_state(lat: &WavenumberLattice, seed: u64) -> PhysicalState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gen = || (0..lat.len()).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>();
        PhysicalState { rho: gen(), velocity: [gen(), gen(), gen()] }
    }

    #[test]
    fn constant_field_has_only_zero_mode() {
        let lat = lattice(8, 3.0);
        let state = PhysicalState { rho: vec![2.5; lat.len()], ..PhysicalState::zeros(lat.len()) };
        let spec = to_spectral(&state, &lat).unwrap();
        assert!((spec.coeffs[0][0] - C64::new(2.5, 0.0)).norm() < 1e-14);
        for z in &spec.coeffs[0][1..] {
            assert!(z.norm() < 1e-14);
        }
    }

    #[test]
    fn cosine_has_two_half_modes() {
        for (n, l) in [(8, 2.0 * PI), (16, 5.0), (12, 0.3)] {
            let lat = lattice(n, l);
            let rho = field_from(&lat, |x| (2.0 * PI * x[0] / l).cos());
            let spec = to_spectral(&PhysicalState { rho, ..PhysicalState::zeros(lat.len()) }, &lat).unwrap();
            let plus = lat.index_of_offsets([1, 0, 0]);
            let minus = lat.index_of_offsets([-1, 0, 0]);
            for (idx, z) in spec.coeffs[0].iter().enumerate() {
                let expected = if idx == plus || idx == minus { 0.5 } else { 0.0 };
                assert!((z - C64::new(expected, 0.0)).norm() < 1e-14, "n={n} idx={idx} z={z}");
            }
        }
    }

    #[test]
    fn round_trip_on_seeded_random_states() {
        let lat = lattice(8, 1.7);
        for seed in 0..100 {
            let state = random_state(&lat, seed);
            let back = to_physical(&to_spectral(&state, &lat).unwrap(), &lat).unwrap();
            for (a, b) in state.components().iter().zip(back.components()) {
                let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let err = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
                assert!(err <= 1e-12 * scale, "seed {seed}: {err}");
            }
        }
    }

    #[test]
    fn spectra_of_real_fields_are_hermitian() {
        let lat = lattice(8, 1.0);
        let spec = to_spectral(&random_state(&lat, 3), &lat).unwrap();
        assert!(spec.hermitian_defect(&lat) < 1e-15);
    }

    #[test]
    fn derivative_of_cosine() {
        let lat = lattice(32, 2.0 * PI);
        let rho = field_from(&lat, |x| x[0].cos());
        let spec = to_spectral(&PhysicalState { rho, ..PhysicalState::zeros(lat.len()) }, &lat).unwrap();
        let d = spectral_derivative(&spec, 0, 0, 1, &lat).unwrap();
        let phys = inverse_field(&d, &lat);
        for (idx, v) in phys.iter().enumerate() {
            assert!((v + lat.point(idx)[0].sin()).abs() < 1e-12);
        }
        let same = spectral_derivative(&spec, 0, 0, 0, &lat).unwrap();
        assert_eq!(same, spec.coeffs[0]);
    }

    #[test]
    fn second_derivative_multiplies_by_minus_xi_squared() {
        let lat = lattice(8, 2.0);
        let mut spec = SpectralState::zeros(lat.len());
        let idx = lat.index_of_offsets([1, -2, 3]);
        spec.coeffs[2][idx] = C64::new(0.3, -0.7);
        let xi = lat.wavevector(idx);
        for axis in 0..3 {
            let d = spectral_derivative(&spec, 2, axis, 2, &lat).unwrap();
            let expected = C64::new(0.3, -0.7) * (-xi[axis] * xi[axis]);
            assert!((d[idx] - expected).norm() < 1e-14);
        }
        assert!(matches!(spectral_derivative(&spec, 0, 0, 5, &lat), Err(Error::UnsupportedOrder(5))));
    }

    #[test]
    fn derivative_and_dealias_preserve_hermitian_symmetry() {
        let lat = lattice(8, 1.3);
        let spec = to_spectral(&random_state(&lat, 11), &lat).unwrap();
        for order in 0..=4 {
            for axis in 0..3 {
                let d = spectral_derivative(&spec, 1, axis, order, &lat).unwrap();
                let s = SpectralState { coeffs: [d.clone(), d.clone(), d.clone(), d] };
                assert!(s.hermitian_defect(&lat) < 1e-13, "order {order} axis {axis}");
            }
        }
        assert!(dealias(&spec, &lat).hermitian_defect(&lat) < 1e-15);
    }

    #[test]
    fn dealias_behaviour() {
        let lat = lattice(12, 1.0);
        let mut spec = SpectralState::zeros(lat.len());
        for (off, v) in [([1, 2, -3], 1.0), ([4, 0, 0], 2.0), ([-4, 4, 1], 3.0)] {
            spec.coeffs[0][lat.index_of_offsets(off)] = C64::new(v, 0.0);
        }
        assert_eq!(dealias(&spec, &lat), spec);

        let mut high = SpectralState::zeros(lat.len());
        high.coeffs[1][lat.index_of_offsets([5, 0, 0])] = C64::new(1.0, 0.0);
        assert_eq!(dealias(&high, &lat), SpectralState::zeros(lat.len()));

        let full = to_spectral(&random_state(&lat, 5), &lat).unwrap();
        let once = dealias(&full, &lat);
        assert_eq!(dealias(&once, &lat), once);
    }

    #[test]
    fn shape_errors() {
        let lat = lattice(8, 1.0);
        let bad = PhysicalState::zeros(10);
        assert!(matches!(to_spectral(&bad, &lat), Err(Error::Shape { .. })));
        assert!(matches!(to_physical(&SpectralState::zeros(3), &lat), Err(Error::Shape { .. })));
    }

    #[test]
    fn resample_preserves_band_limited_fields() {
        let coarse = lattice(8, 2.0 * PI);
        let fine = lattice(16, 2.0 * PI);
        let rho = field_from(&coarse, |x| (x[0]).sin() + 0.5 * (2.0 * x[1] - x[2]).cos());
        let spec = forward_field(&rho, &coarse);
        let up = resample(&spec, &coarse, &fine).unwrap();
        let phys = inverse_field(&up, &fine);
        for (idx, v) in phys.iter().enumerate() {
            let x = fine.point(idx);
            assert!((v - (x[0].sin() + 0.5 * (2.0 * x[1] - x[2]).cos())).abs() < 1e-13);
        }
    }
}
