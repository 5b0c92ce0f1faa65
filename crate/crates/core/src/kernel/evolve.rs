use std::f64::consts::PI;

use super::radial::{integrate_radial, RadialMode, RadialNorm, RadialOptions};
use crate::green::{radial_parts, Part};
use crate::{Error, Result, ViscosityParams, C64};

/// Fourier transform on `ℝ³` of the `gaussian_bump` initial data, restricted
/// to `ξ = r·e₁`: `ϱ = εe^{−|x|²/σ²}`, `u = ε(x/σ)e^{−|x|²/σ²}`.
pub fn gaussian_bump_radial(amplitude: f64, width: f64) -> impl Fn(f64) -> [C64; 4] {
    move |r: f64| {
        let g = amplitude * PI.powf(1.5) * width.powi(3) * (-0.25 * r * r * width * width).exp();
        let zero = C64::new(0.0, 0.0);
        [C64::new(g, 0.0), C64::new(0.0, -0.5 * width * r * g), zero, zero]
    }
}

/// Norm of `D^k G_part(t) * V₀` on `ℝ³` for data whose transform along `e₁`
/// is `data(r)` and which is isotropic in the sense that `|Ĝ(ξ)V̂₀(ξ)|`
/// depends on `|ξ|` only (radial densities with longitudinal velocities).
///
/// `L2Kernel` gives `‖D^k V(t)‖_{L²}`; `L1Symbol` gives the Hausdorff–Young
/// bound on `‖D^k V(t)‖_{L^∞}`.
pub fn evolved_norm_radial(
    t: f64,
    part: Part,
    k: usize,
    mode: RadialMode,
    params: &ViscosityParams,
    data: &dyn Fn(f64) -> [C64; 4],
    opts: &RadialOptions,
) -> Result<RadialNorm> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("evolution time must be finite and non-negative, got {t}")));
    }
    if k > 2 {
        return Err(Error::UnsupportedOrder(k));
    }
    let f = |r: f64| {
        let v = radial_parts(t, r, params, [1.0, 0.0, 0.0]).get(part).apply(data(r));
        let m2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let (g, e) = match mode {
            RadialMode::L2Kernel => (m2, 2 * k),
            RadialMode::L1Symbol => (m2.sqrt(), k),
        };
        4.0 * PI * r * r * r.powi(e as i32) * g / (8.0 * PI * PI * PI)
    };
    let breaks = [0.5, 1.0, params.confluent_radius()];
    let mut out = integrate_radial(&f, &breaks, opts)?;
    if mode == RadialMode::L2Kernel {
        out.value = out.value.max(0.0).sqrt();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_norm_matches_closed_form() {
        // ‖ϱ₀‖² = ε²(π/2)^{3/2}σ³, ‖u₀‖² = ε²(π/2)^{3/2}σ³·(3/4)
        let p = ViscosityParams::new(1.0, 0.0, 1.0, 1.4).unwrap();
        let (eps, s) = (0.01, 3.0);
        let data = gaussian_bump_radial(eps, s);
        let got = evolved_norm_radial(0.0, Part::Full, 0, RadialMode::L2Kernel, &p, &data, &RadialOptions::default())
            .unwrap()
            .value;
        let want = (eps * eps * (PI / 2.0).powf(1.5) * s.powi(3) * 1.75).sqrt();
        assert!((got / want - 1.0).abs() < 1e-8, "{got} vs {want}");
    }
}
