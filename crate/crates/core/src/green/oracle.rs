use nalgebra::Matrix4;

use crate::{Error, Result, ViscosityParams, C64};

/// Generator `L̂(ξ) = [[0, iξᵀ], [iξ, μ|ξ|²I + (μ+λ)ξξᵀ]]`.
pub fn generator(xi: [f64; 3], params: &ViscosityParams) -> Matrix4<C64> {
    let mut l = Matrix4::from_element(C64::new(0.0, 0.0));
    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    for j in 0..3 {
        l[(0, j + 1)] = C64::new(0.0, xi[j]);
        l[(j + 1, 0)] = C64::new(0.0, xi[j]);
        for k in 0..3 {
            let diag = if j == k { params.mu() * r2 } else { 0.0 };
            l[(j + 1, k + 1)] = C64::new(diag + params.mu_plus_lambda() * xi[j] * xi[k], 0.0);
        }
    }
    l
}

/// `e^{−t L̂(ξ)}` by Taylor series with scaling and squaring.
pub fn expm_oracle(t: f64, xi: [f64; 3], params: &ViscosityParams) -> Result<Matrix4<C64>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("oracle time must be finite and non-negative, got {t}")));
    }
    Ok(expm(&(generator(xi, params) * C64::new(-t, 0.0))))
}

/// Matrix exponential of a small dense complex matrix.
pub fn expm(a: &Matrix4<C64>) -> Matrix4<C64> {
    let norm1 = one_norm(a);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm1 * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let b = a * C64::new(scale, 0.0);
    let mut result = Matrix4::identity();
    let mut term = Matrix4::identity();
    for k in 1..40 {
        term = term * b * C64::new(1.0 / k as f64, 0.0);
        result += term;
        if one_norm(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result * result;
    }
    result
}

fn one_norm(a: &Matrix4<C64>) -> f64 {
    (0..4).map(|j| (0..4).map(|i| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
}
