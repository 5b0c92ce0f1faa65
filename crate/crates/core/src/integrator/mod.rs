//! Exponential time stepping of `V_t + LV = N(V)`.
//!
//! The linear part is propagated exactly by the symbol; the nonlinearity
//! enters through the Duhamel integral, approximated by exponential Euler
//! or by the second-order exponential Runge–Kutta scheme of Cox and Matthews:
//!
//! ```text
//! a   = e^{A}V + dt·φ₁(A)N(V)
//! V⁺  = a + dt·φ₂(A)(N(a) − N(V)),        A = −dt·L̂
//! ```

mod phi;
mod run;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::green::{part_operator_polar, ModeOperator, Part};
use crate::nonlinear::{evaluate_rhs_spectral, RhsOptions};
use crate::spectral::{reduce, SpectralState, WavenumberLattice};
use crate::{Error, Result, ViscosityParams, C64};

pub use phi::{phi1_matrix, phi2_matrix};
pub use run::{run_simulation, run_simulation_with, EnergySample, MonitorConfig, RunRecord, Termination};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ExponentialEuler,
    Etdrk2,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::ExponentialEuler => "exponential_euler",
            Scheme::Etdrk2 => "etdrk2",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exponential_euler" | "euler" => Ok(Scheme::ExponentialEuler),
            "etdrk2" => Ok(Scheme::Etdrk2),
            other => Err(Error::config(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Largest admissible step (resolves the unit acoustic time scale).
pub const MAX_DT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    /// steps between diagnostics samples
    pub cadence: usize,
    /// drop the nonlinearity (pure propagator runs)
    pub linear_only: bool,
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(Error::config(format!("dt must lie in (0, {MAX_DT}], got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return Err(Error::config(format!("t_end = {} must be at least dt = {}", self.t_end, self.dt)));
        }
        if self.cadence == 0 {
            return Err(Error::config("diagnostics cadence must be a positive step count"));
        }
        let steps = self.t_end / self.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::config(format!("t_end = {} is not a whole number of steps of {}", self.t_end, self.dt)));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Per-mode operators `e^{A}`, `φ₁(A)`, `φ₂(A)` for a fixed step.
pub struct Stepper<'a> {
    lattice: &'a WavenumberLattice,
    params: ViscosityParams,
    scheme: Scheme,
    dt: f64,
    linear_only: bool,
    rhs_opts: RhsOptions,
    ops: Vec<[ModeOperator; 3]>,
}

impl fmt::Debug for Stepper<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Stepper")
            .field("n", &self.lattice.n())
            .field("scheme", &self.scheme)
            .field("dt", &self.dt)
            .field("linear_only", &self.linear_only)
            .finish()
    }
}

/// Result of one step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: SpectralState,
    /// dealiased `N̂` at the start of the step (absent for linear-only steps)
    pub rhs_start: Option<SpectralState>,
    /// `max |N₄|` over all stages of the step
    pub max_viscous_density: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(
        lattice: &'a WavenumberLattice,
        params: ViscosityParams,
        scheme: Scheme,
        dt: f64,
        linear_only: bool,
        vacuum_floor: f64,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::domain(format!("time step must be positive, got {dt}")));
        }
        let ops = (0..lattice.len())
            .into_par_iter()
            .map(|idx| {
                let (r, dir) = lattice.symbol_coordinates(idx);
                let [p1, p2] = phi::phi_operators(dt, r, dir, &params);
                [part_operator_polar(dt, r, dir, &params, Part::Full), p1, p2]
            })
            .collect();
        Ok(Stepper {
            lattice,
            params,
            scheme,
            dt,
            linear_only,
            rhs_opts: RhsOptions { vacuum_floor, keep_terms: false },
            ops,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn lattice(&self) -> &WavenumberLattice {
        self.lattice
    }

    pub fn params(&self) -> &ViscosityParams {
        &self.params
    }

    /// Advances `state` by one step; `index` labels numerical errors.
    pub fn step(&self, state: &SpectralState, index: usize) -> Result<StepOutcome> {
        state.check_shape(self.lattice)?;
        let dt = self.dt;
        if self.linear_only {
            let out = self.combine(state, None, |[e, _, _], v, _| e.apply(v));
            return self.finish(out, None, 0.0, index);
        }
        let n0 = evaluate_rhs_spectral(state, &self.params, self.lattice, &self.rhs_opts)?;
        let a = self.combine(state, Some(&n0.spectral), |[e, p1, _], v, n| add(e.apply(v), p1.apply(n), dt));
        match self.scheme {
            Scheme::ExponentialEuler => self.finish(a, Some(n0.spectral), n0.max_viscous_density, index),
            Scheme::Etdrk2 => {
                let n1 = evaluate_rhs_spectral(&a, &self.params, self.lattice, &self.rhs_opts)?;
                let mut diff = n1.spectral;
                diff.axpy(-1.0, &n0.spectral);
                let out = self.combine(&a, Some(&diff), |[_, _, p2], v, d| add(v, p2.apply(d), dt));
                let max_n4 = n0.max_viscous_density.max(n1.max_viscous_density);
                self.finish(out, Some(n0.spectral), max_n4, index)
            }
        }
    }

    fn combine<F>(&self, state: &SpectralState, other: Option<&SpectralState>, f: F) -> SpectralState
    where
        F: Fn(&[ModeOperator; 3], [C64; 4], [C64; 4]) -> [C64; 4] + Sync,
    {
        let zero = [C64::new(0.0, 0.0); 4];
        let mapped: Vec<[C64; 4]> = self
            .ops
            .par_iter()
            .enumerate()
            .map(|(idx, ops)| f(ops, state.mode(idx), other.map_or(zero, |o| o.mode(idx))))
            .collect();
        let mut out = SpectralState::zeros(state.len());
        for (idx, v) in mapped.into_iter().enumerate() {
            for c in 0..4 {
                out.coeffs[c][idx] = v[c];
            }
        }
        out
    }

    fn finish(
        &self,
        state: SpectralState,
        rhs_start: Option<SpectralState>,
        max_viscous_density: f64,
        index: usize,
    ) -> Result<StepOutcome> {
        if !state.all_finite() {
            return Err(Error::Numerical { step: Some(index), detail: "non-finite spectral coefficient".into() });
        }
        Ok(StepOutcome { state, rhs_start, max_viscous_density })
    }
}

#[inline]
fn add(a: [C64; 4], b: [C64; 4], s: f64) -> [C64; 4] {
    [a[0] + b[0] * s, a[1] + b[1] * s, a[2] + b[2] * s, a[3] + b[3] * s]
}

/// One step of the chosen scheme (convenience wrapper that rebuilds the operators).
pub fn step(
    state: &SpectralState,
    dt: f64,
    params: &ViscosityParams,
    scheme: Scheme,
    lattice: &WavenumberLattice,
) -> Result<SpectralState> {
    let stepper = Stepper::new(lattice, *params, scheme, dt, false, crate::nonlinear::VACUUM_FLOOR)?;
    Ok(stepper.step(state, 0)?.state)
}

/// `½∫(ϱ² + |u|²)`
pub fn energy(spec: &SpectralState, lattice: &WavenumberLattice) -> f64 {
    0.5 * lattice.volume()
        * reduce::sum_by(0, lattice.len(), &|i| spec.coeffs.iter().map(|c| c[i].norm_sqr()).sum::<f64>())
}

/// `μ∫|∇u|² + (μ+λ)∫(div u)²`
pub fn dissipation(spec: &SpectralState, params: &ViscosityParams, lattice: &WavenumberLattice) -> f64 {
    let (mu, mpl) = (params.mu(), params.mu_plus_lambda());
    lattice.volume()
        * reduce::sum_by(0, lattice.len(), &|i| {
            // same coordinates as the propagator, so the identity holds mode by mode
            let (r, d) = lattice.symbol_coordinates(i);
            let u = [spec.coeffs[1][i], spec.coeffs[2][i], spec.coeffs[3][i]];
            let dot = u[0] * d[0] + u[1] * d[1] + u[2] * d[2];
            r * r * (mu * (u[0].norm_sqr() + u[1].norm_sqr() + u[2].norm_sqr()) + mpl * dot.norm_sqr())
        })
}

/// `∫(ϱN_ϱ + u·N_u)`
pub fn production(spec: &SpectralState, rhs: &SpectralState, lattice: &WavenumberLattice) -> f64 {
    lattice.volume()
        * reduce::sum_by(0, lattice.len(), &|i| (0..4).map(|c| (spec.coeffs[c][i].conj() * rhs.coeffs[c][i]).re).sum())
}
