//! Nonlinear terms of the perturbation system for `ρ = 1 + ϱ`.
//!
//! ```text
//! N_ϱ = −∇·(ϱu)
//! N_u = −u·∇u − H_γ(ϱ)∇ϱ + G_α(ϱ)(2μ ∇ϱ·Du + λ (div u)∇ϱ) + H_α(ϱ)(μΔu + (μ+λ)∇div u)
//! ```
//!
//! with `H_γ = (1+ϱ)^{γ−2} − 1`, `G_α = α(1+ϱ)^{α−2}`, `H_α = (1+ϱ)^{α−1} − 1`
//! and `(∇ϱ·Du)_i = Σ_j ∂_jϱ (∂_j u_i + ∂_i u_j)/2`.

use rayon::prelude::*;
use serde::Serialize;

use crate::spectral::reduce;
use crate::spectral::{
    dealias_field, forward_pair, inverse_pair, inverse_pair_from, lp_norm, to_physical, LpExponent, PhysicalState,
    SpectralState, WavenumberLattice,
};
use crate::{Error, Result, ViscosityParams, C64};

/// Default lower bound on `1 + ϱ` below which a step aborts.
pub const VACUUM_FLOOR: f64 = 1e-6;

fn check_density(rho: f64) -> Result<f64> {
    let total = 1.0 + rho;
    if total > 0.0 {
        Ok(total)
    } else {
        Err(Error::Vacuum { min_density: total, floor: 0.0 })
    }
}

/// `H_γ(ϱ) = (1+ϱ)^{γ−2} − 1`
pub fn h_gamma(rho: f64, gamma: f64) -> Result<f64> {
    check_density(rho)?;
    Ok(((gamma - 2.0) * rho.ln_1p()).exp_m1())
}

/// `G_α(ϱ) = α(1+ϱ)^{α−2}`
pub fn g_alpha(rho: f64, alpha: f64) -> Result<f64> {
    Ok(alpha * check_density(rho)?.powf(alpha - 2.0))
}

/// `H_α(ϱ) = (1+ϱ)^{α−1} − 1`
pub fn h_alpha(rho: f64, alpha: f64) -> Result<f64> {
    check_density(rho)?;
    Ok(((alpha - 1.0) * rho.ln_1p()).exp_m1())
}

/// Physical-space right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearRHS {
    pub n_rho: Vec<f64>,
    pub n_u: [Vec<f64>; 3],
}

/// The four velocity contributions, each a 3-vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsTerms {
    /// `−u·∇u`
    pub convection: [Vec<f64>; 3],
    /// `−H_γ(ϱ)∇ϱ`
    pub pressure: [Vec<f64>; 3],
    /// `G_α(ϱ)(2μ∇ϱ·Du + λ div u ∇ϱ)`
    pub viscous_gradient: [Vec<f64>; 3],
    /// `H_α(ϱ)(μΔu + (μ+λ)∇div u)`
    pub viscous_density: [Vec<f64>; 3],
}

/// Spectral right-hand side plus the by-products the integrator monitors.
#[derive(Debug, Clone)]
pub struct RhsEvaluation {
    /// dealiased `(N̂_ϱ, N̂_u)`
    pub spectral: SpectralState,
    /// `max |N₄|` over the grid, before dealiasing
    pub max_viscous_density: f64,
    pub min_density: f64,
    pub terms: Option<RhsTerms>,
}

/// Options for [`evaluate_rhs_spectral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsOptions {
    pub vacuum_floor: f64,
    pub keep_terms: bool,
}

impl Default for RhsOptions {
    fn default() -> Self {
        RhsOptions { vacuum_floor: VACUUM_FLOOR, keep_terms: false }
    }
}

/// Norms of the individual velocity terms, for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TermNorms {
    pub convection: f64,
    pub pressure: f64,
    pub viscous_gradient: f64,
    pub viscous_density: f64,
}

impl RhsTerms {
    pub fn l2_norms(&self, lattice: &WavenumberLattice) -> Result<TermNorms> {
        let n = |v: &[Vec<f64>; 3]| lp_norm(&[&v[0], &v[1], &v[2]], LpExponent::Two, lattice);
        Ok(TermNorms {
            convection: n(&self.convection)?,
            pressure: n(&self.pressure)?,
            viscous_gradient: n(&self.viscous_gradient)?,
            viscous_density: n(&self.viscous_density)?,
        })
    }
}

/// `N̂(V)` from spectral coefficients alone: derivatives spectrally,
/// products pointwise, one dealiasing pass at the end.
pub fn evaluate_rhs_spectral(
    spec: &SpectralState,
    params: &ViscosityParams,
    lattice: &WavenumberLattice,
    opts: &RhsOptions,
) -> Result<RhsEvaluation> {
    spec.check_shape(lattice)?;
    let n = lattice.len();
    let [rho_hat, u1_hat, u2_hat, u3_hat] = &spec.coeffs;
    let u_hat = [u1_hat, u2_hat, u3_hat];

    let (rho, u0) = inverse_pair(rho_hat, u1_hat, lattice);
    let (u1, u2) = inverse_pair(u2_hat, u3_hat, lattice);
    let u = [u0, u1, u2];

    let min_density = reduce::min_by(0, n, &|i| 1.0 + rho[i]);
    if !(min_density > opts.vacuum_floor) {
        return Err(Error::Vacuum { min_density, floor: opts.vacuum_floor });
    }

    // ∂_jϱ (3), ∂_j u_i (9), μΔu + (μ+λ)∇div u (3), generated per mode
    let (mu, mpl) = (params.mu(), params.mu_plus_lambda());
    let field = |f: usize, idx: usize, xi: [f64; 3]| -> C64 {
        match f {
            0..=2 => rho_hat[idx] * C64::new(0.0, xi[f]),
            3..=11 => u_hat[(f - 3) / 3][idx] * C64::new(0.0, xi[(f - 3) % 3]),
            12..=14 => {
                let i = f - 12;
                let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                let dot = u1_hat[idx] * xi[0] + u2_hat[idx] * xi[1] + u3_hat[idx] * xi[2];
                -(u_hat[i][idx] * (mu * r2)) - dot * (mpl * xi[i])
            }
            _ => C64::new(0.0, 0.0),
        }
    };
    let mut phys: Vec<Vec<f64>> = Vec::with_capacity(16);
    for f in (0..15).step_by(2) {
        let (a, b) = inverse_pair_from(lattice, |idx, xi| (field(f, idx, xi), field(f + 1, idx, xi)));
        phys.push(a);
        phys.push(b);
    }
    let grad_rho = &phys[0..3];
    let grad_u = |i: usize, j: usize| &phys[3 + 3 * i + j];
    let visc = &phys[12..15];

    let (alpha, gamma, lambda) = (params.alpha(), params.gamma(), params.lambda_bulk());

    // the four force densities at one grid point
    let terms_at = |p: usize| -> [[f64; 3]; 4] {
        let log_total = rho[p].ln_1p();
        let hg = ((gamma - 2.0) * log_total).exp_m1();
        let ha = ((alpha - 1.0) * log_total).exp_m1();
        // α(1+ϱ)^{α−2} = α(1 + h_α)/(1+ϱ)
        let ga = alpha * (1.0 + ha) / (1.0 + rho[p]);
        let g = [grad_rho[0][p], grad_rho[1][p], grad_rho[2][p]];
        let div = grad_u(0, 0)[p] + grad_u(1, 1)[p] + grad_u(2, 2)[p];
        let mut terms = [[0.0; 3]; 4];
        for i in 0..3 {
            terms[0][i] = -(u[0][p] * grad_u(i, 0)[p] + u[1][p] * grad_u(i, 1)[p] + u[2][p] * grad_u(i, 2)[p]);
            terms[1][i] = -hg * g[i];
            let mut strain = 0.0;
            for j in 0..3 {
                strain += g[j] * 0.5 * (grad_u(i, j)[p] + grad_u(j, i)[p]);
            }
            terms[2][i] = ga * (2.0 * mu * strain + lambda * div * g[i]);
            terms[3][i] = ha * visc[i][p];
        }
        terms
    };
    // per point: flux (3), n_u (3), |N₄|
    let points: Vec<[f64; 7]> = (0..n)
        .into_par_iter()
        .map(|p| {
            let t = terms_at(p);
            let nu = [0, 1, 2].map(|i| t[0][i] + t[1][i] + t[2][i] + t[3][i]);
            let n4 = (t[3][0] * t[3][0] + t[3][1] * t[3][1] + t[3][2] * t[3][2]).sqrt();
            [rho[p] * u[0][p], rho[p] * u[1][p], rho[p] * u[2][p], nu[0], nu[1], nu[2], n4]
        })
        .collect();

    let max_viscous_density = reduce::max_by(0, n, &|p| points[p][6]);
    let terms = opts.keep_terms.then(|| {
        let all: Vec<[[f64; 3]; 4]> = (0..n).into_par_iter().map(terms_at).collect();
        let field = |t: usize, i: usize| all.iter().map(|pt| pt[t][i]).collect::<Vec<f64>>();
        let vec3 = |t: usize| [field(t, 0), field(t, 1), field(t, 2)];
        RhsTerms { convection: vec3(0), pressure: vec3(1), viscous_gradient: vec3(2), viscous_density: vec3(3) }
    });
    drop(phys);

    let col = |c: usize| points.iter().map(|pt| pt[c]).collect::<Vec<f64>>();
    let (f0, f1) = forward_pair(&col(0), &col(1), lattice);
    let (f2, nu0) = forward_pair(&col(2), &col(3), lattice);
    let (nu1, nu2) = forward_pair(&col(4), &col(5), lattice);
    drop(points);

    let mut n_rho: Vec<C64> =
        lattice.map_modes(|idx, xi| -(f0[idx] * xi[0] + f1[idx] * xi[1] + f2[idx] * xi[2]) * C64::new(0.0, 1.0));
    n_rho[0] = C64::new(0.0, 0.0);
    let mut out = SpectralState { coeffs: [n_rho, nu0, nu1, nu2] };
    for c in out.coeffs.iter_mut() {
        dealias_field(c, lattice);
    }
    if !out.all_finite() {
        return Err(Error::Numerical { step: None, detail: "non-finite nonlinear term".into() });
    }
    Ok(RhsEvaluation { spectral: out, max_viscous_density, min_density, terms })
}

/// Physical-space `N(V)` for a consistent `(physical, spectral)` pair.
pub fn evaluate_rhs(
    phys: &PhysicalState,
    spec: &SpectralState,
    params: &ViscosityParams,
    lattice: &WavenumberLattice,
) -> Result<NonlinearRHS> {
    phys.check_shape(lattice)?;
    check_consistency(phys, spec, lattice)?;
    let eval = evaluate_rhs_spectral(spec, params, lattice, &RhsOptions::default())?;
    let back = to_physical(&eval.spectral, lattice)?;
    Ok(NonlinearRHS { n_rho: back.rho, n_u: back.velocity })
}

fn check_consistency(phys: &PhysicalState, spec: &SpectralState, lattice: &WavenumberLattice) -> Result<()> {
    let back = to_physical(spec, lattice)?;
    for (name, (a, b)) in ["rho", "u1", "u2", "u3"].iter().zip(phys.components().iter().zip(back.components())) {
        let scale = a.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
        let err = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        if err > 1e-9 * scale.max(1e-12) {
            return Err(Error::Inconsistent(format!("component {name}: physical and spectral data differ by {err:e}")));
        }
    }
    Ok(())
}

/// `sup|H_α(ϱ)| / (|α−1|·sup|ϱ|)`; zero for `ϱ ≡ 0`.
pub fn h_alpha_smallness_check(rho: &[f64], alpha: f64) -> Result<f64> {
    if alpha == 1.0 {
        return Err(Error::Degenerate("α = 1 makes H_α vanish identically; the ratio is undefined".into()));
    }
    let sup_rho = rho.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut sup_h = 0.0f64;
    for &r in rho {
        sup_h = sup_h.max(h_alpha(r, alpha)?.abs());
    }
    if sup_rho == 0.0 {
        return Ok(0.0);
    }
    Ok(sup_h / ((alpha - 1.0).abs() * sup_rho))
}

/// Density coefficient whose composition bound is checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Composition {
    HGamma(f64),
    HAlpha(f64),
}

impl Composition {
    pub fn eval(self, rho: f64) -> Result<f64> {
        match self {
            Composition::HGamma(g) => h_gamma(rho, g),
            Composition::HAlpha(a) => h_alpha(rho, a),
        }
    }
}

/// `‖∇^k f(ϱ)‖_p / ‖∇^k ϱ‖_p` with the full derivative tensor; `0` when both vanish.
pub fn composition_bound_check(
    rho: &[f64],
    f: Composition,
    k: usize,
    p: LpExponent,
    lattice: &WavenumberLattice,
) -> Result<f64> {
    if !(1..=4).contains(&k) {
        return Err(Error::UnsupportedOrder(k));
    }
    if !matches!(p, LpExponent::Two | LpExponent::Infinity) {
        return Err(Error::config(format!("composition check supports p = 2 or inf, got {p}")));
    }
    if rho.len() != lattice.len() {
        return Err(Error::Shape { expected: lattice.len(), found: rho.len() });
    }
    let composed = rho.iter().map(|&r| f.eval(r)).collect::<Result<Vec<f64>>>()?;
    let norm = |field: &[f64]| -> Result<f64> {
        let spec = crate::spectral::forward_field(field, lattice);
        match p {
            LpExponent::Two => Ok(crate::spectral::seminorm_of(std::slice::from_ref(&spec), k, lattice)),
            _ => {
                let (fields, weights) = crate::spectral::gradient_tensor_fields(&[&spec], k, lattice)?;
                let refs: Vec<&[f64]> = fields.iter().map(|v| v.as_slice()).collect();
                crate::spectral::lp_norm_weighted(&refs, &weights, p, lattice)
            }
        }
    };
    let num = norm(&composed)?;
    let den = norm(rho)?;
    if den == 0.0 {
        if num == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::Degenerate(format!("‖∇^{k} ϱ‖ vanishes while ‖∇^{k} f(ϱ)‖ = {num:e}")));
    }
    Ok(num / den)
}
