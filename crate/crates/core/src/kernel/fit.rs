use std::fmt;

use serde::{Deserialize, Serialize};

use crate::spectral::LpExponent;
use crate::{Error, Result};

/// Minimum coefficient of determination for a fit to count as a pass.
pub const MIN_R_SQUARED: f64 = 0.98;

/// Time series of a norm together with what it measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub label: String,
    pub p: LpExponent,
    pub k: usize,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl NormSeries {
    pub fn new(label: impl Into<String>, p: LpExponent, k: usize, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let s = NormSeries { label: label.into(), p, k, times, values };
        s.validate()?;
        Ok(s)
    }

    pub fn empty(label: impl Into<String>, p: LpExponent, k: usize) -> Self {
        NormSeries { label: label.into(), p, k, times: Vec::new(), values: Vec::new() }
    }

    pub fn push(&mut self, t: f64, value: f64) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::config(format!("series `{}`: time {t} not after {last}", self.label)));
            }
        }
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::domain(format!("series `{}`: invalid value {value} at t={t}", self.label)));
        }
        self.times.push(t);
        self.values.push(value);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.values.len() {
            return Err(Error::Shape { expected: self.times.len(), found: self.values.len() });
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config(format!("series `{}`: times not strictly increasing", self.label)));
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::domain(format!("series `{}`: negative or non-finite value", self.label)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecayModel {
    /// `value ∝ (1+t)^{−σ}`
    Algebraic,
    /// `value ∝ e^{−ct}`
    Exponential,
}

impl fmt::Display for DecayModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecayModel::Algebraic => "algebraic",
            DecayModel::Exponential => "exponential",
        })
    }
}

/// How the fitted rate is compared with the theoretical one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FitBound {
    /// `|fitted − theory| ≤ tol`
    TwoSided,
    /// `fitted ≥ theory − tol`
    Lower,
    /// `fitted > 0`; theory and tolerance are informational
    Positive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub model: DecayModel,
    pub fitted_rate: f64,
    /// log-amplitude of the fitted line
    pub intercept: f64,
    pub window: (f64, f64),
    pub samples: usize,
    pub r_squared: f64,
    pub theory_rate: f64,
    pub tolerance: f64,
    pub bound: FitBound,
    pub pass: bool,
}

impl DecayFit {
    fn judge(&mut self) {
        let rate_ok = match self.bound {
            FitBound::TwoSided => (self.fitted_rate - self.theory_rate).abs() <= self.tolerance,
            FitBound::Lower => self.fitted_rate >= self.theory_rate - self.tolerance,
            FitBound::Positive => self.fitted_rate > 0.0,
        };
        self.pass = rate_ok && self.r_squared >= MIN_R_SQUARED;
    }

    /// Short human-readable reason when the fit fails.
    pub fn diagnostic(&self) -> Option<String> {
        if self.pass {
            return None;
        }
        if self.r_squared < MIN_R_SQUARED {
            return Some(format!("r² = {:.4} below {MIN_R_SQUARED}", self.r_squared));
        }
        Some(format!(
            "rate {:.4} outside {:?} bound around {:.4} ± {}",
            self.fitted_rate, self.bound, self.theory_rate, self.tolerance
        ))
    }
}

/// Two-sided least-squares decay fit over `window` (inclusive).
pub fn fit_decay(
    series: &NormSeries,
    model: DecayModel,
    window: (f64, f64),
    theory_rate: f64,
    tolerance: f64,
) -> Result<DecayFit> {
    fit_decay_bounded(series, model, window, theory_rate, tolerance, FitBound::TwoSided)
}

pub fn fit_decay_bounded(
    series: &NormSeries,
    model: DecayModel,
    window: (f64, f64),
    theory_rate: f64,
    tolerance: f64,
    bound: FitBound,
) -> Result<DecayFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in series.times.iter().zip(&series.values) {
        if t < window.0 || t > window.1 {
            continue;
        }
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::domain(format!(
                "series `{}` has non-positive value {v} at t={t} inside the fit window",
                series.label
            )));
        }
        xs.push(match model {
            DecayModel::Algebraic => (1.0 + t).ln(),
            DecayModel::Exponential => t,
        });
        ys.push(v.ln());
    }
    if xs.len() < 8 {
        return Err(Error::config(format!(
            "series `{}`: fit window [{}, {}] holds {} samples, need at least 8",
            series.label,
            window.0,
            window.1,
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("fit window has a single abscissa".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy <= f64::EPSILON * f64::EPSILON * (1.0 + my * my) * n {
        // flat data: perfectly described by a zero slope
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    let mut fit = DecayFit {
        model,
        fitted_rate: -slope,
        intercept,
        window,
        samples: xs.len(),
        r_squared,
        theory_rate,
        tolerance,
        bound,
        pass: false,
    };
    fit.judge();
    Ok(fit)
}
