use crate::{ViscosityParams, C64};

/// Roots of `λ² + ν r² λ + r² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub lambda_plus: C64,
    pub lambda_minus: C64,
    /// `(λ₊ + λ₋)/2 = −ν r²/2`
    pub lambda_bar: C64,
    /// `(λ₊ − λ₋)/2`, principal square root of the reduced discriminant
    pub delta: C64,
}

impl EigenPair {
    /// `true` when the roots are real and distinct enough to be told apart.
    pub fn is_real(&self) -> bool {
        self.delta.im == 0.0
    }
}

pub fn eigenvalues(xi_mag: f64, params: &ViscosityParams) -> EigenPair {
    let r = xi_mag.abs();
    let nu = params.nu();
    let r2 = r * r;
    let bar = -0.5 * nu * r2;
    if r == 0.0 {
        let z = C64::new(0.0, 0.0);
        return EigenPair { lambda_plus: z, lambda_minus: z, lambda_bar: z, delta: z };
    }
    // ν²r⁴/4 − r² factored so the sign flip at r = 2/ν is resolved accurately
    let h = 0.5 * nu * r;
    let disc = r2 * (h - 1.0) * (h + 1.0);
    if disc >= 0.0 {
        let d = disc.sqrt();
        let minus = bar - d;
        let plus = r2 / minus;
        EigenPair {
            lambda_plus: C64::new(plus, 0.0),
            lambda_minus: C64::new(minus, 0.0),
            lambda_bar: C64::new(bar, 0.0),
            delta: C64::new(d, 0.0),
        }
    } else {
        let d = (-disc).sqrt();
        EigenPair {
            lambda_plus: C64::new(bar, d),
            lambda_minus: C64::new(bar, -d),
            lambda_bar: C64::new(bar, 0.0),
            delta: C64::new(0.0, d),
        }
    }
}

/// Scalar coefficients `(m, g₋, g₊)` of the symbol.
///
/// ```text
/// m  = (e^{λ₊t} − e^{λ₋t})/(λ₊ − λ₋)
/// g₋ = (λ₊e^{λ₋t} − λ₋e^{λ₊t})/(λ₊ − λ₋)
/// g₊ = (λ₊e^{λ₊t} − λ₋e^{λ₋t})/(λ₊ − λ₋)
/// ```
///
/// evaluated without the 0/0 at the double root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableEntries {
    pub m: C64,
    pub g_minus: C64,
    pub g_plus: C64,
}

const SERIES_CUTOFF: f64 = 1e-3;
const SPLIT_CUTOFF: f64 = 20.0;

pub fn stable_entries(t: f64, xi_mag: f64, params: &ViscosityParams) -> StableEntries {
    entries_from(&eigenvalues(xi_mag, params), t)
}

pub(crate) fn entries_from(eig: &EigenPair, t: f64) -> StableEntries {
    let z = eig.delta * t;
    let bar_t = eig.lambda_bar * t;
    if z.re.abs() > SPLIT_CUTOFF {
        // widely separated real roots: e^{λ̄t} and cosh(Δt) would under/overflow
        let (lp, lm) = (eig.lambda_plus, eig.lambda_minus);
        let (ep, em) = ((lp * t).exp(), (lm * t).exp());
        let two_delta = eig.delta * 2.0;
        return StableEntries {
            m: (ep - em) / two_delta,
            g_minus: (lp * em - lm * ep) / two_delta,
            g_plus: (lp * ep - lm * em) / two_delta,
        };
    }
    let (cosh, sinhc) = cosh_sinhc(z);
    let e = bar_t.exp();
    StableEntries { m: e * sinhc * t, g_minus: e * (cosh - bar_t * sinhc), g_plus: e * (cosh + bar_t * sinhc) }
}

/// `(cosh z, sinh z / z)`.
pub(crate) fn cosh_sinhc(z: C64) -> (C64, C64) {
    if z.norm() < SERIES_CUTOFF {
        let z2 = z * z;
        let sinhc = 1.0 + z2 * (1.0 / 6.0 + z2 * (1.0 / 120.0 + z2 / 5040.0));
        let cosh = 1.0 + z2 * (0.5 + z2 * (1.0 / 24.0 + z2 / 720.0));
        (cosh, sinhc)
    } else {
        (z.cosh(), z.sinh() / z)
    }
}
