use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::reduce;
use super::state::{derivative_of, inverse_field, inverse_pair, SpectralState};
use super::WavenumberLattice;
use crate::{Error, Result, C64};

/// Integrability exponents supported by the discrete norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LpExponent {
    One,
    FourThirds,
    Two,
    Four,
    Infinity,
}

impl LpExponent {
    pub const ALL: [LpExponent; 5] =
        [LpExponent::One, LpExponent::FourThirds, LpExponent::Two, LpExponent::Four, LpExponent::Infinity];

    pub fn value(self) -> f64 {
        match self {
            LpExponent::One => 1.0,
            LpExponent::FourThirds => 4.0 / 3.0,
            LpExponent::Two => 2.0,
            LpExponent::Four => 4.0,
            LpExponent::Infinity => f64::INFINITY,
        }
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(self) -> f64 {
        match self {
            LpExponent::Infinity => 0.0,
            p => 1.0 / p.value(),
        }
    }

    pub fn from_value(p: f64) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.value() == p || (p.is_finite() && (e.value() - p).abs() < 1e-12))
            .ok_or_else(|| Error::config(format!("unsupported Lebesgue exponent p = {p}")))
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpExponent::One => "1",
            LpExponent::FourThirds => "4/3",
            LpExponent::Two => "2",
            LpExponent::Four => "4",
            LpExponent::Infinity => "inf",
        })
    }
}

impl FromStr for LpExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(LpExponent::One),
            "4/3" => Ok(LpExponent::FourThirds),
            "2" => Ok(LpExponent::Two),
            "4" => Ok(LpExponent::Four),
            "inf" | "infinity" | "∞" => Ok(LpExponent::Infinity),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::config(format!("unsupported Lebesgue exponent `{other}`")))
                .and_then(LpExponent::from_value),
        }
    }
}

/// Discrete `Lᵖ` norm of a vector field whose pointwise magnitude is the
/// Euclidean norm across `fields`.
pub fn lp_norm(fields: &[&[f64]], p: LpExponent, lattice: &WavenumberLattice) -> Result<f64> {
    let weights = vec![1.0; fields.len()];
    lp_norm_weighted(fields, &weights, p, lattice)
}

/// Like [`lp_norm`] with pointwise magnitude `√(Σ wᵢ fᵢ²)`. Used for gradient
/// tensors where symmetric entries are stored once with their multiplicity.
pub fn lp_norm_weighted(fields: &[&[f64]], weights: &[f64], p: LpExponent, lattice: &WavenumberLattice) -> Result<f64> {
    if fields.len() != weights.len() {
        return Err(Error::Shape { expected: fields.len(), found: weights.len() });
    }
    for f in fields {
        if f.len() != lattice.len() {
            return Err(Error::Shape { expected: lattice.len(), found: f.len() });
        }
    }
    if fields.is_empty() {
        return Ok(0.0);
    }
    let mag2 = |i: usize| -> f64 { fields.iter().zip(weights).map(|(f, w)| w * f[i] * f[i]).sum() };
    let n = lattice.len();
    let dv = lattice.cell_volume();
    let value = match p {
        LpExponent::Infinity => reduce::max_by(0, n, &|i| mag2(i)).sqrt(),
        LpExponent::Two => (reduce::sum_by(0, n, &mag2) * dv).sqrt(),
        LpExponent::One => reduce::sum_by(0, n, &|i| mag2(i).sqrt()) * dv,
        LpExponent::Four => (reduce::sum_by(0, n, &|i| mag2(i).powi(2)) * dv).powf(0.25),
        LpExponent::FourThirds => (reduce::sum_by(0, n, &|i| mag2(i).powf(2.0 / 3.0)) * dv).powf(0.75),
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Numerical { step: None, detail: format!("non-finite L^{p} norm") })
    }
}

/// `√(Σ_ξ |ξ|^{2k} |V̂(ξ)|² |Ω|)` over all four components.
pub fn sobolev_seminorm(spec: &SpectralState, k: usize, lattice: &WavenumberLattice) -> Result<f64> {
    if k > 4 {
        return Err(Error::UnsupportedOrder(k));
    }
    spec.check_shape(lattice)?;
    Ok(seminorm_of(&spec.coeffs, k, lattice))
}

pub(crate) fn seminorm_of(coeffs: &[Vec<C64>], k: usize, lattice: &WavenumberLattice) -> f64 {
    let s = reduce::sum_by(0, lattice.len(), &|idx| {
        let xi = lattice.effective_wavevector(idx);
        let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        let w = r2.powi(k as i32);
        w * coeffs.iter().map(|c| c[idx].norm_sqr()).sum::<f64>()
    });
    (s * lattice.volume()).sqrt()
}

/// Physical-space derivative tensor of order `order` for every input
/// component. Each symmetric multi-index appears once; the returned weights
/// are the multinomial multiplicities so that [`lp_norm_weighted`] yields the
/// norm of the full tensor.
pub fn gradient_tensor_fields(
    components: &[&[C64]],
    order: usize,
    lattice: &WavenumberLattice,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    if order > 4 {
        return Err(Error::UnsupportedOrder(order));
    }
    for c in components {
        if c.len() != lattice.len() {
            return Err(Error::Shape { expected: lattice.len(), found: c.len() });
        }
    }
    let indices = multisets(order);
    let mut spectra = Vec::with_capacity(components.len() * indices.len());
    let mut weights = Vec::with_capacity(spectra.capacity());
    for c in components {
        for (axes, w) in &indices {
            spectra.push(derivative_of(c, axes, lattice));
            weights.push(*w);
        }
    }
    let fields = inverse_many(&spectra, lattice);
    Ok((fields, weights))
}

/// Inverse transforms of Hermitian spectra, two per complex FFT.
pub(crate) fn inverse_many(spectra: &[Vec<C64>], lattice: &WavenumberLattice) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(spectra.len());
    let mut chunks = spectra.chunks_exact(2);
    for pair in chunks.by_ref() {
        let (a, b) = inverse_pair(&pair[0], &pair[1], lattice);
        out.push(a);
        out.push(b);
    }
    if let [last] = chunks.remainder() {
        out.push(inverse_field(last, lattice));
    }
    out
}

/// Non-decreasing axis tuples of length `order` with multinomial weights.
fn multisets(order: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(order);
    fn rec(start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, f64)>) {
        if left == 0 {
            let mut counts = [0usize; 3];
            for &a in cur.iter() {
                counts[a] += 1;
            }
            let fact = |m: usize| (1..=m).product::<usize>() as f64;
            let w = fact(cur.len()) / counts.iter().map(|&c| fact(c)).product::<f64>();
            out.push((cur.clone(), w));
            return;
        }
        for a in start..3 {
            cur.push(a);
            rec(a, left - 1, cur, out);
            cur.pop();
        }
    }
    rec(0, order, &mut cur, &mut out);
    out
}
