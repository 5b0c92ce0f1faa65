use serde::{Deserialize, Serialize};

use super::{dissipation, energy, production, SchemeConfig, Stepper};
use crate::diagnostics::{check_apriori, sample_norms, AprioriStatus, NormBundle};
use crate::kernel::NormSeries;
use crate::nonlinear::VACUUM_FLOOR;
use crate::spectral::{to_spectral, PhysicalState, SpectralState, WavenumberLattice};
use crate::{Error, Result, ViscosityParams};

/// Runtime observers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonitorConfig {
    /// gradient threshold of the a-priori bounds
    pub eta: f64,
    pub vacuum_floor: f64,
    /// stop on an a-priori violation (otherwise only record it)
    pub enforce_thresholds: bool,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        MonitorConfig { eta: 0.1, vacuum_floor: VACUUM_FLOOR, enforce_thresholds: true }
    }
}

impl MonitorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::config(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.vacuum_floor > 0.0 && self.vacuum_floor < 1.0) {
            return Err(Error::config(format!("vacuum floor must lie in (0, 1), got {}", self.vacuum_floor)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    VacuumAbort { step: usize, min_density: f64 },
    ThresholdViolation { step: usize, status: AprioriStatus },
    NumericalError { step: usize, detail: String },
}

impl Termination {
    pub fn is_completed(&self) -> bool {
        matches!(self, Termination::Completed)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Termination::Completed => "Completed",
            Termination::VacuumAbort { .. } => "VacuumAbort",
            Termination::ThresholdViolation { .. } => "ThresholdViolation",
            Termination::NumericalError { .. } => "NumericalError",
        }
    }
}

/// Energy balance at one diagnostics sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub production: f64,
    /// centred `dE/dt + D − P`
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: SchemeConfig,
    pub params: ViscosityParams,
    pub monitors: MonitorConfig,
    pub n: usize,
    pub box_length: f64,
    pub samples: Vec<NormBundle>,
    pub apriori: Vec<AprioriStatus>,
    pub energy: Vec<EnergySample>,
    /// `(t, max |N₄|)` at each sample step
    pub viscous_density: Vec<(f64, f64)>,
    pub termination: Termination,
    pub steps_taken: usize,
    pub t_final: f64,
    pub mass_initial: f64,
    pub mass_final: f64,
    #[serde(skip)]
    pub final_state: Option<SpectralState>,
}

impl RunRecord {
    /// One series per recorded norm; `t = 0` is left out so every series is
    /// usable for power-law fits.
    pub fn series(&self) -> Vec<NormSeries> {
        let Some(first) = self.samples.first() else {
            return Vec::new();
        };
        let mut out: Vec<NormSeries> =
            first.series_entries().into_iter().map(|(label, p, k, _)| NormSeries::empty(label, p, k)).collect();
        for b in self.samples.iter().filter(|b| b.t > 0.0) {
            for (s, (_, _, _, v)) in out.iter_mut().zip(b.series_entries()) {
                s.times.push(b.t);
                s.values.push(v);
            }
        }
        out
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.energy.iter().map(|e| e.residual.abs()).fold(0.0, f64::max)
    }

    pub fn mass_drift(&self) -> f64 {
        (self.mass_final - self.mass_initial).abs()
    }
}

/// Advances `initial` to `config.t_end`, sampling norms and monitors every
/// `cadence` steps and at the final step.
pub fn run_simulation(
    initial: &PhysicalState,
    config: &SchemeConfig,
    params: &ViscosityParams,
    lattice: &WavenumberLattice,
    monitors: &MonitorConfig,
) -> Result<RunRecord> {
    run_simulation_with(initial, config, params, lattice, monitors, |_, _| {})
}

/// As [`run_simulation`], calling `progress(step, t)` at every sample.
pub fn run_simulation_with<F: FnMut(usize, f64)>(
    initial: &PhysicalState,
    config: &SchemeConfig,
    params: &ViscosityParams,
    lattice: &WavenumberLattice,
    monitors: &MonitorConfig,
    mut progress: F,
) -> Result<RunRecord> {
    config.validate()?;
    monitors.validate()?;
    initial.check_shape(lattice)?;
    let dt = config.dt;
    let steps = config.steps();
    let mut state = to_spectral(initial, lattice)?;
    let mass_initial = state.coeffs[0][0].re;
    let mut rec = RunRecord {
        config: *config,
        params: *params,
        monitors: *monitors,
        n: lattice.n(),
        box_length: lattice.box_length(),
        samples: Vec::new(),
        apriori: Vec::new(),
        energy: Vec::new(),
        viscous_density: Vec::new(),
        termination: Termination::Completed,
        steps_taken: 0,
        t_final: 0.0,
        mass_initial,
        mass_final: mass_initial,
        final_state: None,
    };

    let min_density = initial.min_density();
    if !(min_density > monitors.vacuum_floor) {
        rec.termination = Termination::VacuumAbort { step: 0, min_density };
        rec.final_state = Some(state);
        return Ok(rec);
    }

    let stepper = Stepper::new(lattice, *params, config.scheme, dt, config.linear_only, monitors.vacuum_floor)?;
    let mut e_prev = f64::NAN;
    // (t, E_{n−1}, E_n, D_n, P_n) of the last sample, closed once E_{n+1} is known
    let mut pending: Option<(f64, f64, f64, f64, f64)> = None;

    for n in 0..=steps {
        let t = n as f64 * dt;
        let e_now = energy(&state, lattice);
        if let Some((ts, e_before, e_at, d, p)) = pending.take() {
            let residual = (e_now - e_before) / (2.0 * dt) + d - p;
            rec.energy.push(EnergySample { t: ts, energy: e_at, dissipation: d, production: p, residual });
        }
        rec.steps_taken = n;
        rec.t_final = t;
        rec.mass_final = state.coeffs[0][0].re;

        let sampled = n % config.cadence == 0 || n == steps;
        if sampled {
            let bundle = match sample_norms(&state, lattice, t) {
                Ok(b) => b,
                Err(Error::Numerical { detail, .. }) => {
                    rec.termination = Termination::NumericalError { step: n, detail };
                    break;
                }
                Err(e) => return Err(e),
            };
            let status = check_apriori(&bundle, monitors.eta, t);
            rec.samples.push(bundle);
            rec.apriori.push(status);
            progress(n, t);
            if !status.is_ok() && monitors.enforce_thresholds {
                rec.termination = Termination::ThresholdViolation { step: n, status };
                break;
            }
        }
        if n == steps {
            break;
        }

        let outcome = match stepper.step(&state, n) {
            Ok(o) => o,
            Err(Error::Vacuum { min_density, .. }) => {
                rec.termination = Termination::VacuumAbort { step: n, min_density };
                break;
            }
            Err(Error::Numerical { detail, .. }) => {
                rec.termination = Termination::NumericalError { step: n, detail };
                break;
            }
            Err(e) => return Err(e),
        };
        if sampled {
            rec.viscous_density.push((t, outcome.max_viscous_density));
            if n >= 1 {
                let d = dissipation(&state, params, lattice);
                let p = outcome.rhs_start.as_ref().map_or(0.0, |rhs| production(&state, rhs, lattice));
                pending = Some((t, e_prev, e_now, d, p));
            }
        }
        e_prev = e_now;
        state = outcome.state;
    }
    rec.final_state = Some(state);
    Ok(rec)
}
