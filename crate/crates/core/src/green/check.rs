use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::eigen::eigenvalues;
use super::oracle::expm_oracle;
use super::symbol::{symbol, symbol_parts};
use crate::{Result, ViscosityParams, C64};

/// One `(t, ξ, params)` point of the verification sampling plan.
#[derive(Debug, Clone, Copy)]
pub struct SymbolSample {
    pub t: f64,
    pub s: f64,
    pub xi: [f64; 3],
    pub params: ViscosityParams,
}

/// Random admissible parameters: `μ ∈ [0.2, 2]`, `λ ∈ [−2μ/3, 2]`.
pub fn random_params(rng: &mut impl Rng) -> ViscosityParams {
    let mu = rng.random_range(0.2..2.0);
    let lambda = rng.random_range(-2.0 * mu / 3.0..2.0);
    let alpha = rng.random_range(0.5..1.5);
    let gamma = rng.random_range(1.05..2.5);
    ViscosityParams::new(mu, lambda, alpha, gamma).expect("sampled parameters are admissible")
}

fn random_direction(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// `generic` samples with `t ∈ [0,5]`, `|ξ| ∈ [0,10]`, followed by
/// `confluent` samples within `1e−4` of `|ξ| = 2/ν`. `s ∈ [0,2]` is the
/// second time used by semigroup checks.
pub fn sampling_plan(generic: usize, confluent: usize, seed: u64) -> Vec<SymbolSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(generic + confluent);
    for i in 0..generic + confluent {
        let params = random_params(&mut rng);
        let t = rng.random_range(0.0..=5.0);
        let s = rng.random_range(0.0..=2.0);
        let r = if i < generic {
            rng.random_range(0.0..=10.0)
        } else {
            params.confluent_radius() + rng.random_range(-1e-4..=1e-4)
        };
        let d = random_direction(&mut rng);
        out.push(SymbolSample { t, s, xi: [r * d[0], r * d[1], r * d[2]], params });
    }
    out
}

/// Worst-case deviations over a sampling plan.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SymbolCheckReport {
    pub samples: usize,
    /// max entrywise |symbol − expm oracle|
    pub oracle_error: f64,
    /// max operator 2-norm of the full symbol
    pub max_operator_norm: f64,
    /// max ‖Ĝ(t+s) − Ĝ(t)Ĝ(s)‖_F
    pub semigroup_error: f64,
    /// max entrywise |Ĝ(t,−ξ) − conj Ĝ(t,ξ)|
    pub reality_error: f64,
    /// max entrywise |L + HR + HS − Full|
    pub part_sum_error: f64,
    /// max relative Vieta residual of the eigenvalues
    pub vieta_error: f64,
}

fn max_entry(m: &Matrix4<C64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

fn check_one(s: &SymbolSample) -> Result<SymbolCheckReport> {
    let p = &s.params;
    let full = symbol(s.t, s.xi, p)?;
    let oracle = expm_oracle(s.t, s.xi, p)?;
    let g_ts = symbol(s.t + s.s, s.xi, p)?;
    let g_s = symbol(s.s, s.xi, p)?;
    let neg = symbol(s.t, [-s.xi[0], -s.xi[1], -s.xi[2]], p)?;
    let (l, hr, hs) = symbol_parts(s.t, s.xi, p)?;
    let r = (s.xi[0] * s.xi[0] + s.xi[1] * s.xi[1] + s.xi[2] * s.xi[2]).sqrt();
    let eig = eigenvalues(r, p);
    let r2 = r * r;
    let sum = eig.lambda_plus + eig.lambda_minus + p.nu() * r2;
    let prod = eig.lambda_plus * eig.lambda_minus - r2;
    let vieta = if r == 0.0 { 0.0 } else { (sum.norm() / (p.nu() * r2)).max(prod.norm() / r2) };
    Ok(SymbolCheckReport {
        samples: 1,
        oracle_error: max_entry(&(full.entries - oracle)),
        max_operator_norm: full.operator_norm(),
        semigroup_error: (g_ts.entries - full.entries * g_s.entries).norm(),
        reality_error: max_entry(&(neg.entries - full.entries.map(|z| z.conj()))),
        part_sum_error: max_entry(&(l.entries + hr.entries + hs.entries - full.entries)),
        vieta_error: vieta,
    })
}

/// Evaluates every structural check on every sample.
pub fn symbol_check(plan: &[SymbolSample]) -> Result<SymbolCheckReport> {
    let rows: Vec<SymbolCheckReport> = plan.par_iter().map(check_one).collect::<Result<_>>()?;
    Ok(rows.into_iter().fold(SymbolCheckReport::default(), |a, b| SymbolCheckReport {
        samples: a.samples + b.samples,
        oracle_error: a.oracle_error.max(b.oracle_error),
        max_operator_norm: a.max_operator_norm.max(b.max_operator_norm),
        semigroup_error: a.semigroup_error.max(b.semigroup_error),
        reality_error: a.reality_error.max(b.reality_error),
        part_sum_error: a.part_sum_error.max(b.part_sum_error),
        vieta_error: a.vieta_error.max(b.vieta_error),
    }))
}
