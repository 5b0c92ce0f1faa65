//! Exponential-integrator weights `φ₁(A) = Σ A^k/(k+1)!` and
//! `φ₂(A) = Σ A^k/(k+2)!` for `A = −dt·L̂(ξ)`.
//!
//! On the longitudinal pair, `A` is 2×2 with trace `s = −ν r² dt` and
//! determinant `p = r² dt²`, so Cayley–Hamilton gives every analytic function
//! as `c₁A + c₀I`. Starting from `e^A = (m/dt)·A + g₋·I`:
//!
//! ```text
//! φ₁: c₁ = (1 − g₋)/p,  c₀ = m/dt − s·c₁
//! φ₂: d₁ = (1 − c₀)/p,  d₀ = c₁ − s·d₁
//! ```
//!
//! Both lose accuracy as `p → 0`, where the Taylor series is used instead.

use nalgebra::Matrix4;

use crate::green::{stable_entries, ModeOperator};
use crate::{Error, Result, ViscosityParams, C64};

const TAYLOR_RADIUS: f64 = 0.5;

/// Coefficients `(c₀, c₁)` of `φ₁` and `φ₂` on the longitudinal block.
fn longitudinal(dt: f64, r: f64, params: &ViscosityParams) -> [(C64, C64); 2] {
    let s = -params.nu() * r * r * dt;
    let p = r * r * dt * dt;
    // ‖A‖_F² = 2p + s²
    if (2.0 * p + s * s).sqrt() < TAYLOR_RADIUS {
        return taylor(s, p);
    }
    let e = stable_entries(dt, r, params);
    let c1 = (1.0 - e.g_minus) / p;
    let c0 = e.m / dt - c1 * s;
    let d1 = (1.0 - c0) / p;
    let d0 = c1 - d1 * s;
    [(c0, c1), (d0, d1)]
}

/// Series in `A` reduced with `A² = sA − pI`.
fn taylor(s: f64, p: f64) -> [(C64, C64); 2] {
    // A^k = a_k A + b_k I
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut fact1 = 1.0; // (k+1)!
    let mut fact2 = 2.0; // (k+2)!
    let (mut c0, mut c1, mut d0, mut d1) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..60 {
        c0 += b / fact1;
        c1 += a / fact1;
        d0 += b / fact2;
        d1 += a / fact2;
        let (na, nb) = (a * s + b, -a * p);
        a = na;
        b = nb;
        fact1 *= (k + 2) as f64;
        fact2 *= (k + 3) as f64;
        if (a.abs() + b.abs()) / fact1 < 1e-20 {
            break;
        }
    }
    [(C64::new(c0, 0.0), C64::new(c1, 0.0)), (C64::new(d0, 0.0), C64::new(d1, 0.0))]
}

/// Scalar `(φ₁(z), φ₂(z))` for real `z ≤ 0`.
fn scalar_phi(z: f64) -> (f64, f64) {
    if z.abs() < TAYLOR_RADIUS {
        let (mut p1, mut p2) = (0.0, 0.0);
        let mut term1 = 1.0; // z^k/(k+1)!
        let mut term2 = 0.5; // z^k/(k+2)!
        for k in 0..30 {
            p1 += term1;
            p2 += term2;
            term1 *= z / (k + 2) as f64;
            term2 *= z / (k + 3) as f64;
        }
        (p1, p2)
    } else {
        let p1 = z.exp_m1() / z;
        (p1, (p1 - 1.0) / z)
    }
}

/// `(φ₁, φ₂)` at one mode as compact operators.
pub(crate) fn phi_operators(dt: f64, r: f64, dir: [f64; 3], params: &ViscosityParams) -> [ModeOperator; 2] {
    if r == 0.0 {
        return [ModeOperator::IDENTITY, ModeOperator::IDENTITY.scaled(0.5)];
    }
    let (t1, t2) = scalar_phi(-params.mu() * r * r * dt);
    if dir == [0.0; 3] {
        // frozen density, see the matching case of the propagator
        let one = ModeOperator {
            long: [[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(t1, 0.0)]],
            trans: C64::new(t1, 0.0),
            dir,
        };
        let two = ModeOperator {
            long: [[C64::new(0.5, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(t2, 0.0)]],
            trans: C64::new(t2, 0.0),
            dir,
        };
        return [one, two];
    }
    let coeffs = longitudinal(dt, r, params);
    let off = C64::new(0.0, -r * dt);
    let diag = -params.nu() * r * r * dt;
    let build = |(c0, c1): (C64, C64), trans: f64| ModeOperator {
        long: [[c0, c1 * off], [c1 * off, c0 + c1 * diag]],
        trans: C64::new(trans, 0.0),
        dir,
    };
    [build(coeffs[0], t1), build(coeffs[1], t2)]
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("time step must be positive, got {dt}")))
    }
}

fn polar(xi: [f64; 3]) -> (f64, [f64; 3]) {
    let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
    if r == 0.0 {
        (0.0, [0.0; 3])
    } else {
        (r, [xi[0] / r, xi[1] / r, xi[2] / r])
    }
}

/// `φ₁(−dt·L̂(ξ))` as a 4×4 matrix.
pub fn phi1_matrix(dt: f64, xi: [f64; 3], params: &ViscosityParams) -> Result<Matrix4<C64>> {
    check_dt(dt)?;
    let (r, dir) = polar(xi);
    Ok(phi_operators(dt, r, dir, params)[0].to_matrix())
}

/// `φ₂(−dt·L̂(ξ))` as a 4×4 matrix.
pub fn phi2_matrix(dt: f64, xi: [f64; 3], params: &ViscosityParams) -> Result<Matrix4<C64>> {
    check_dt(dt)?;
    let (r, dir) = polar(xi);
    Ok(phi_operators(dt, r, dir, params)[1].to_matrix())
}
