use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use super::eigen::{eigenvalues, entries_from, EigenPair};
use crate::{Error, Result, ViscosityParams, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Frequency part of the propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Part {
    Full,
    Low,
    HighRegular,
    HighSingular,
}

impl Part {
    pub fn short_name(self) -> &'static str {
        match self {
            Part::Full => "Full",
            Part::Low => "L",
            Part::HighRegular => "HR",
            Part::HighSingular => "HS",
        }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Part {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Full" | "full" | "F" => Ok(Part::Full),
            "L" | "Low" | "low" => Ok(Part::Low),
            "HR" | "HighRegular" | "high-regular" => Ok(Part::HighRegular),
            "HS" | "HighSingular" | "high-singular" => Ok(Part::HighSingular),
            other => Err(Error::config(format!("unknown propagator part `{other}`"))),
        }
    }
}

/// Smooth partition of unity in `|ξ|`: 1 below 1/2, 0 above 1.
pub fn cutoff_chi(xi_mag: f64) -> f64 {
    if xi_mag <= 0.5 {
        return 1.0;
    }
    if xi_mag > 1.0 {
        return 0.0;
    }
    let f = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    let a = f(1.0 - xi_mag);
    let b = f(xi_mag - 0.5);
    a / (a + b)
}

/// Action of one symbol part on one mode, in the basis
/// `(ϱ̂, a = ξ'·û)` plus the transverse remainder of `û`.
///
/// The 4×4 matrix is
/// `[[L₀₀, L₀₁ξ'ᵀ], [L₁₀ξ', τ(I − ξ'ξ'ᵀ) + L₁₁ξ'ξ'ᵀ]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeOperator {
    pub long: [[C64; 2]; 2],
    pub trans: C64,
    pub dir: [f64; 3],
}

impl ModeOperator {
    pub const IDENTITY: ModeOperator = ModeOperator { long: [[ONE, ZERO], [ZERO, ONE]], trans: ONE, dir: [0.0; 3] };

    pub const ZERO: ModeOperator = ModeOperator { long: [[ZERO, ZERO], [ZERO, ZERO]], trans: ZERO, dir: [0.0; 3] };

    #[inline]
    pub fn apply(&self, v: [C64; 4]) -> [C64; 4] {
        let d = self.dir;
        let a = v[1] * d[0] + v[2] * d[1] + v[3] * d[2];
        let rho = self.long[0][0] * v[0] + self.long[0][1] * a;
        let a_new = self.long[1][0] * v[0] + self.long[1][1] * a;
        let shift = a_new - self.trans * a;
        [rho, self.trans * v[1] + shift * d[0], self.trans * v[2] + shift * d[1], self.trans * v[3] + shift * d[2]]
    }

    /// Squared Frobenius norm of the 4×4 matrix.
    pub fn frobenius_sqr(&self) -> f64 {
        let d2 = self.dir[0] * self.dir[0] + self.dir[1] * self.dir[1] + self.dir[2] * self.dir[2];
        if d2 == 0.0 {
            // ξ = 0: velocity block is τ·I
            return self.long[0][0].norm_sqr() + 3.0 * self.trans.norm_sqr();
        }
        self.long[0][0].norm_sqr()
            + self.long[0][1].norm_sqr()
            + self.long[1][0].norm_sqr()
            + self.long[1][1].norm_sqr()
            + 2.0 * self.trans.norm_sqr()
    }

    pub fn scaled(&self, s: f64) -> ModeOperator {
        let mut out = *self;
        for row in out.long.iter_mut() {
            for z in row.iter_mut() {
                *z *= s;
            }
        }
        out.trans *= s;
        out
    }

    pub fn to_matrix(&self) -> Matrix4<C64> {
        let d = self.dir;
        let mut m = Matrix4::from_element(ZERO);
        m[(0, 0)] = self.long[0][0];
        for j in 0..3 {
            m[(0, j + 1)] = self.long[0][1] * d[j];
            m[(j + 1, 0)] = self.long[1][0] * d[j];
            for k in 0..3 {
                let proj = d[j] * d[k];
                let eye = if j == k { 1.0 } else { 0.0 };
                m[(j + 1, k + 1)] = self.trans * (eye - proj) + self.long[1][1] * proj;
            }
        }
        m
    }
}

/// Symbol `Ĝ(t, ξ)` (or one of its frequency parts) at a single mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorMatrix {
    pub entries: Matrix4<C64>,
    pub t: f64,
    pub xi: [f64; 3],
    pub part: Part,
}

impl PropagatorMatrix {
    pub fn operator_norm(&self) -> f64 {
        let sv = self.entries.singular_values();
        sv.max()
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("propagator time must be finite and non-negative, got {t}")))
    }
}

fn magnitude(xi: [f64; 3]) -> f64 {
    (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt()
}

fn direction(xi: [f64; 3], r: f64) -> [f64; 3] {
    if r == 0.0 {
        [0.0; 3]
    } else {
        [xi[0] / r, xi[1] / r, xi[2] / r]
    }
}

/// The four parts at one mode, as compact operators.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PartOperators {
    pub full: ModeOperator,
    pub low: ModeOperator,
    pub high_regular: ModeOperator,
    pub high_singular: ModeOperator,
}

impl PartOperators {
    pub fn get(&self, part: Part) -> ModeOperator {
        match part {
            Part::Full => self.full,
            Part::Low => self.low,
            Part::HighRegular => self.high_regular,
            Part::HighSingular => self.high_singular,
        }
    }
}

/// Full symbol as a compact operator; `t` is assumed valid.
pub(crate) fn full_operator(t: f64, xi: [f64; 3], params: &ViscosityParams) -> ModeOperator {
    let r = magnitude(xi);
    if r == 0.0 {
        return ModeOperator::IDENTITY;
    }
    radial_full(t, r, &eigenvalues(r, params), params, direction(xi, r))
}

pub(crate) fn radial_full(t: f64, r: f64, eig: &EigenPair, params: &ViscosityParams, dir: [f64; 3]) -> ModeOperator {
    if r == 0.0 {
        return ModeOperator::IDENTITY;
    }
    let trans = C64::new((-params.mu() * r * r * t).exp(), 0.0);
    if dir == [0.0; 3] {
        // lattice-only case (every nonzero component on a Nyquist plane): the
        // discrete gradient vanishes, so ϱ is frozen and u is purely viscous
        return ModeOperator { long: [[ONE, ZERO], [ZERO, trans]], trans, dir };
    }
    let s = entries_from(eig, t);
    let off = C64::new(0.0, -r) * s.m;
    ModeOperator { long: [[s.g_minus, off], [off, s.g_plus]], trans, dir }
}

/// Singular `(1,1)` entry: `(1−χ(|ξ|))·(1−χ(ν|ξ|/4))·(−λ₋/(λ₊−λ₋))·e^{λ₊t}`.
///
/// The second cutoff vanishes up to twice the double-root radius `2/ν`, so
/// the entry is only extracted where the roots are real and well separated;
/// without it `1/(λ₊−λ₋)` has a pole at `|ξ| = 2/ν`.
pub(crate) fn singular_entry(t: f64, r: f64, eig: &EigenPair, params: &ViscosityParams) -> C64 {
    let weight = (1.0 - cutoff_chi(r)) * (1.0 - cutoff_chi(0.25 * params.nu() * r));
    if weight == 0.0 || !eig.is_real() {
        return ZERO;
    }
    -eig.lambda_minus / (eig.delta * 2.0) * (eig.lambda_plus * t).exp() * weight
}

pub(crate) fn radial_parts(t: f64, r: f64, params: &ViscosityParams, dir: [f64; 3]) -> PartOperators {
    if r == 0.0 {
        return PartOperators {
            full: ModeOperator::IDENTITY,
            low: ModeOperator::IDENTITY,
            high_regular: ModeOperator { dir, ..ModeOperator::ZERO },
            high_singular: ModeOperator { dir, ..ModeOperator::ZERO },
        };
    }
    let eig = eigenvalues(r, params);
    let full = radial_full(t, r, &eig, params, dir);
    let chi = cutoff_chi(r);
    let low = full.scaled(chi);
    let hs = if dir == [0.0; 3] { ZERO } else { singular_entry(t, r, &eig, params) };
    let high_singular = ModeOperator { long: [[hs, ZERO], [ZERO, ZERO]], trans: ZERO, dir };
    let mut high_regular = full.scaled(1.0 - chi);
    high_regular.long[0][0] -= hs;
    PartOperators { full, low, high_regular, high_singular }
}

pub(crate) fn part_operator(t: f64, xi: [f64; 3], params: &ViscosityParams, part: Part) -> ModeOperator {
    let r = magnitude(xi);
    part_operator_polar(t, r, direction(xi, r), params, part)
}

/// [`part_operator`] from a magnitude and a unit (or zero) direction.
pub(crate) fn part_operator_polar(t: f64, r: f64, dir: [f64; 3], params: &ViscosityParams, part: Part) -> ModeOperator {
    match part {
        Part::Full if r > 0.0 => radial_full(t, r, &eigenvalues(r, params), params, dir),
        Part::Full => ModeOperator::IDENTITY,
        _ => radial_parts(t, r, params, dir).get(part),
    }
}

/// Full symbol `Ĝ(t, ξ)`.
pub fn symbol(t: f64, xi: [f64; 3], params: &ViscosityParams) -> Result<PropagatorMatrix> {
    check_time(t)?;
    let op = full_operator(t, xi, params);
    Ok(PropagatorMatrix { entries: op.to_matrix(), t, xi, part: Part::Full })
}

/// `(Low, HighRegular, HighSingular)` parts of the symbol.
pub fn symbol_parts(
    t: f64,
    xi: [f64; 3],
    params: &ViscosityParams,
) -> Result<(PropagatorMatrix, PropagatorMatrix, PropagatorMatrix)> {
    check_time(t)?;
    let r = magnitude(xi);
    let ops = radial_parts(t, r, params, direction(xi, r));
    let wrap = |op: ModeOperator, part| PropagatorMatrix { entries: op.to_matrix(), t, xi, part };
    Ok((
        wrap(ops.low, Part::Low),
        wrap(ops.high_regular, Part::HighRegular),
        wrap(ops.high_singular, Part::HighSingular),
    ))
}

/// One named part of the symbol.
pub fn symbol_part(t: f64, xi: [f64; 3], params: &ViscosityParams, part: Part) -> Result<PropagatorMatrix> {
    check_time(t)?;
    Ok(PropagatorMatrix { entries: part_operator(t, xi, params, part).to_matrix(), t, xi, part })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nu2() -> ViscosityParams {
        ViscosityParams::new(1.0, 0.0, 1.0, 1.4).unwrap()
    }

    fn max_diff(a: &Matrix4<C64>, b: &Matrix4<C64>) -> f64 {
        (a - b).iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    #[test]
    fn zero_direction_mode_is_a_semigroup() {
        let p = nu2();
        let v = [C64::new(0.3, 0.1), C64::new(-0.2, 0.0), C64::new(0.1, 0.4), C64::new(0.0, -0.5)];
        let step = part_operator_polar(0.05, 2.5, [0.0; 3], &p, Part::Full);
        let mut w = v;
        for _ in 0..200 {
            w = step.apply(w);
        }
        let once = part_operator_polar(10.0, 2.5, [0.0; 3], &p, Part::Full).apply(v);
        for (a, b) in w.iter().zip(&once) {
            assert!((a - b).norm() < 1e-14, "{a} vs {b}");
        }
        assert_eq!(once[0], v[0]);
    }

    #[test]
    fn cutoff_values() {
        assert_eq!(cutoff_chi(0.3), 1.0);
        assert_eq!(cutoff_chi(1.5), 0.0);
        assert!((cutoff_chi(0.75) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=1000 {
            let c = cutoff_chi(0.5 + 0.5 * i as f64 / 1000.0);
            assert!(c <= prev && (0.0..=1.0).contains(&c));
            prev = c;
        }
    }

    #[test]
    fn identity_at_zero_mode_and_time() {
        let p = nu2();
        let eye = Matrix4::identity();
        assert_eq!(symbol(3.0, [0.0; 3], &p).unwrap().entries, eye);
        let m = symbol(0.0, [0.3, -2.0, 1.1], &p).unwrap();
        assert!(max_diff(&m.entries, &eye) <= 1e-14);
        assert!(matches!(symbol(-1.0, [1.0, 0.0, 0.0], &p), Err(Error::Domain(_))));
    }

    #[test]
    fn compact_apply_matches_matrix() {
        let p = ViscosityParams::new(0.7, 0.2, 1.0, 1.4).unwrap();
        let v = [C64::new(0.3, 0.1), C64::new(-1.0, 0.5), C64::new(0.2, 0.0), C64::new(0.0, -0.7)];
        for part in [Part::Full, Part::Low, Part::HighRegular, Part::HighSingular] {
            for xi in [[0.4, -0.2, 0.3], [2.0, 1.0, -0.5], [0.0, 0.0, 0.0]] {
                let op = part_operator(0.8, xi, &p, part);
                let m = op.to_matrix();
                let out = op.apply(v);
                for i in 0..4 {
                    let mv: C64 = (0..4).map(|j| m[(i, j)] * v[j]).sum();
                    assert!((mv - out[i]).norm() < 1e-14);
                }
                let fro: f64 = m.iter().map(|z| z.norm_sqr()).sum();
                assert!((fro - op.frobenius_sqr()).abs() <= 1e-13 * fro.max(1.0));
            }
        }
    }

    #[test]
    fn parts_at_low_frequency() {
        let p = nu2();
        let xi = [0.3, 0.0, 0.0];
        let (low, hr, hs) = symbol_parts(2.0, xi, &p).unwrap();
        let full = symbol(2.0, xi, &p).unwrap();
        assert_eq!(low.entries, full.entries);
        assert!(hr.entries.iter().all(|z| z.norm() == 0.0));
        assert!(hs.entries.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn singular_coefficient_near_one_at_high_frequency() {
        let eig = eigenvalues(4.0, &nu2());
        let c = -eig.lambda_minus / (eig.lambda_plus - eig.lambda_minus);
        assert!((c - 1.0).norm() <= 0.1);
    }

    #[test]
    fn parts_sum_to_full() {
        let p = nu2();
        for r in [0.4, 0.6, 0.75, 0.99, 1.0, 1.0 + 1e-6, 1.3, 7.0] {
            let xi = [r * 0.6, -r * 0.8, 0.0];
            for t in [0.0, 0.5, 3.0] {
                let (l, hr, hs) = symbol_parts(t, xi, &p).unwrap();
                let full = symbol(t, xi, &p).unwrap();
                let sum = l.entries + hr.entries + hs.entries;
                assert!(max_diff(&sum, &full.entries) <= 1e-12, "r={r} t={t}");
            }
        }
    }

    #[test]
    fn part_names_round_trip() {
        for part in [Part::Full, Part::Low, Part::HighRegular, Part::HighSingular] {
            assert_eq!(part.to_string().parse::<Part>().unwrap(), part);
        }
        assert!("X".parse::<Part>().is_err());
    }
}
