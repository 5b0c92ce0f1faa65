use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Physical constants of the perturbation system.
///
/// Shear viscosity `μ(ρ) = mu·ρ^alpha`, bulk viscosity
/// `λ(ρ) = lambda_bulk·ρ^alpha`, pressure `P = ρ^gamma / gamma`.
/// The longitudinal diffusivity `ν = 2μ + λ` is always recomputed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ViscosityParams {
    mu: f64,
    lambda_bulk: f64,
    alpha: f64,
    gamma: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    mu: f64,
    lambda_bulk: f64,
    alpha: f64,
    gamma: f64,
}

impl TryFrom<RawParams> for ViscosityParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ViscosityParams::new(raw.mu, raw.lambda_bulk, raw.alpha, raw.gamma)
    }
}

impl From<ViscosityParams> for RawParams {
    fn from(p: ViscosityParams) -> Self {
        RawParams { mu: p.mu, lambda_bulk: p.lambda_bulk, alpha: p.alpha, gamma: p.gamma }
    }
}

impl ViscosityParams {
    pub fn new(mu: f64, lambda_bulk: f64, alpha: f64, gamma: f64) -> Result<Self> {
        let all_finite = [mu, lambda_bulk, alpha, gamma].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::config("viscosity parameters must be finite"));
        }
        if mu <= 0.0 {
            return Err(Error::config(format!("mu must be positive, got {mu}")));
        }
        if 2.0 * mu + 3.0 * lambda_bulk < 0.0 {
            return Err(Error::config(format!(
                "2*mu + 3*lambda_bulk must be nonnegative, got {}",
                2.0 * mu + 3.0 * lambda_bulk
            )));
        }
        if alpha <= 0.0 {
            return Err(Error::config(format!("alpha must be positive, got {alpha}")));
        }
        if gamma <= 1.0 {
            return Err(Error::config(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(ViscosityParams { mu, lambda_bulk, alpha, gamma })
    }

    /// `μ = 1, λ = 0, α = 1, γ = 1.4`.
    pub fn unit() -> Self {
        ViscosityParams { mu: 1.0, lambda_bulk: 0.0, alpha: 1.0, gamma: 1.4 }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda_bulk(&self) -> f64 {
        self.lambda_bulk
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `ν = 2μ + λ`.
    pub fn nu(&self) -> f64 {
        2.0 * self.mu + self.lambda_bulk
    }

    /// `μ + λ`, the coefficient of `∇ div u`.
    pub fn mu_plus_lambda(&self) -> f64 {
        self.mu + self.lambda_bulk
    }

    /// Radius `2/ν` where the two acoustic eigenvalues coincide.
    pub fn confluent_radius(&self) -> f64 {
        2.0 / self.nu()
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self::new(self.mu, self.lambda_bulk, alpha, self.gamma)
    }
}
