//! Norms along a run, the a priori threshold monitor and decay reports.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::kernel::{fit_decay_bounded, DecayFit, DecayModel, FitBound, NormSeries};
use crate::spectral::{
    gradient_tensor_fields, lp_norm_weighted, reduce, sobolev_seminorm, LpExponent, SpectralState, WavenumberLattice,
};
use crate::{Error, Result, C64};

/// Exponents sampled in physical space.
pub const PHYSICAL_EXPONENTS: [LpExponent; 4] =
    [LpExponent::FourThirds, LpExponent::Two, LpExponent::Four, LpExponent::Infinity];

/// Series label for `‖∇^k V‖_{L^p}`, e.g. `D1V_Linf`.
pub fn norm_label(k: usize, p: LpExponent) -> String {
    format!("D{k}V_L{p}")
}

/// Decay exponent of `‖∇^k V‖_{L^p}` for `L¹` data: `(3/2)(1 − 1/p) + k/2`.
pub fn theory_rate(p: LpExponent, k: usize) -> f64 {
    1.5 * (1.0 - p.reciprocal()) + 0.5 * k as f64
}

/// Decay exponent of the bootstrap `L^{4/3}` estimate.
pub const BOOTSTRAP_RATE: f64 = 7.0 / 40.0;

/// Norms of one state at one time.
///
/// On the torus the mean `⟨V⟩` is conserved by the flow and is itself an
/// equilibrium, so the decaying quantities are those of `V − ⟨V⟩`. The
/// a-priori monitor uses the sup of the full state, `sup_total`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormBundle {
    pub t: f64,
    /// `‖∇^k (V − ⟨V⟩)‖_{L²}` from the `|ξ|^k` multiplier, `k = 0, 1, 2`
    pub seminorms: [f64; 3],
    /// `(p, k, ‖∇^k (V − ⟨V⟩)‖_{L^p})` from physical-space fields, `k = 0, 1`
    pub lp: Vec<(LpExponent, usize, f64)>,
    /// `⟨V⟩`
    pub mean: [f64; 4],
    /// `‖V‖_{L^∞}` including the mean
    pub sup_total: f64,
    /// share of `Σ|V̂|²` inside the dealiasing sphere (1 for an empty state)
    pub resolved_fraction: f64,
}

impl NormBundle {
    pub fn lp(&self, p: LpExponent, k: usize) -> Option<f64> {
        self.lp.iter().find(|(q, j, _)| *q == p && *j == k).map(|x| x.2)
    }

    /// `‖V‖_{L^∞}`
    pub fn sup(&self) -> f64 {
        self.sup_total
    }

    /// `‖∇V‖_{L^∞}`
    pub fn sup_gradient(&self) -> f64 {
        self.lp(LpExponent::Infinity, 1).unwrap_or(f64::NAN)
    }

    /// `(label, value)` pairs that make up run series.
    pub fn series_entries(&self) -> Vec<(String, LpExponent, usize, f64)> {
        let mut out: Vec<_> =
            (0..3).map(|k| (norm_label(k, LpExponent::Two), LpExponent::Two, k, self.seminorms[k])).collect();
        for &(p, k, v) in &self.lp {
            if p != LpExponent::Two {
                out.push((norm_label(k, p), p, k, v));
            }
        }
        out
    }

    /// Scales every `L^∞` entry by `factor`.
    pub fn with_scaled_sup(&self, factor: f64) -> NormBundle {
        let mut out = self.clone();
        out.sup_total *= factor;
        for e in out.lp.iter_mut() {
            if e.0 == LpExponent::Infinity {
                e.2 *= factor;
            }
        }
        out
    }
}

/// Norm bundle of a spectral state.
pub fn sample_norms(spec: &SpectralState, lattice: &WavenumberLattice, t: f64) -> Result<NormBundle> {
    spec.check_shape(lattice)?;
    let mut fluct = spec.clone();
    let mut mean = [0.0; 4];
    for (m, c) in mean.iter_mut().zip(fluct.coeffs.iter_mut()) {
        *m = c[0].re;
        c[0] = C64::new(0.0, 0.0);
    }
    let seminorms = [
        sobolev_seminorm(&fluct, 0, lattice)?,
        sobolev_seminorm(&fluct, 1, lattice)?,
        sobolev_seminorm(&fluct, 2, lattice)?,
    ];
    let comps: Vec<&[C64]> = fluct.coeffs.iter().map(|c| c.as_slice()).collect();
    let mut lp = Vec::with_capacity(8);
    let mut sup_total = 0.0;
    for k in 0..2 {
        let (fields, weights) = gradient_tensor_fields(&comps, k, lattice)?;
        let refs: Vec<&[f64]> = fields.iter().map(|f| f.as_slice()).collect();
        for p in PHYSICAL_EXPONENTS {
            lp.push((p, k, lp_norm_weighted(&refs, &weights, p, lattice)?));
        }
        if k == 0 {
            sup_total = reduce::max_by(0, lattice.len(), &|i| {
                refs.iter().zip(&mean).map(|(f, m)| (f[i] + m) * (f[i] + m)).sum::<f64>()
            })
            .sqrt();
        }
    }
    let mask = lattice.dealias_mask();
    let energy = |i: usize| spec.coeffs.iter().map(|c| c[i].norm_sqr()).sum::<f64>();
    let total = reduce::sum_by(0, lattice.len(), &energy);
    let inside = reduce::sum_by(0, lattice.len(), &|i| if mask[i] { energy(i) } else { 0.0 });
    let resolved_fraction = if total > 0.0 { inside / total } else { 1.0 };
    let bundle = NormBundle { t, seminorms, lp, mean, sup_total, resolved_fraction };
    if bundle.seminorms.iter().chain(bundle.lp.iter().map(|x| &x.2)).any(|v| !v.is_finite()) || !sup_total.is_finite() {
        return Err(Error::Numerical { step: None, detail: format!("non-finite norm at t = {t}") });
    }
    Ok(bundle)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AprioriBound {
    /// `‖V‖_{L^∞} ≤ ½(1+t)^{−3/2}`
    Uniform,
    /// `‖∇V‖_{L^∞} ≤ η(1+t)^{−2}`
    Gradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AprioriStatus {
    Ok,
    Violated {
        bound: AprioriBound,
        t: f64,
        value: f64,
        limit: f64,
        /// `value − limit`
        margin: f64,
    },
}

impl AprioriStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, AprioriStatus::Ok)
    }
}

pub fn uniform_limit(t: f64) -> f64 {
    0.5 * (1.0 + t).powf(-1.5)
}

pub fn gradient_limit(eta: f64, t: f64) -> f64 {
    eta * (1.0 + t).powi(-2)
}

/// Threshold check on a bundle; the uniform bound is reported first.
pub fn check_apriori(bundle: &NormBundle, eta: f64, t: f64) -> AprioriStatus {
    check_apriori_values(bundle.sup(), bundle.sup_gradient(), eta, t)
}

pub fn check_apriori_values(sup: f64, sup_gradient: f64, eta: f64, t: f64) -> AprioriStatus {
    let u = uniform_limit(t);
    if !(sup <= u) {
        return AprioriStatus::Violated { bound: AprioriBound::Uniform, t, value: sup, limit: u, margin: sup - u };
    }
    let g = gradient_limit(eta, t);
    if !(sup_gradient <= g) {
        return AprioriStatus::Violated {
            bound: AprioriBound::Gradient,
            t,
            value: sup_gradient,
            limit: g,
            margin: sup_gradient - g,
        };
    }
    AprioriStatus::Ok
}

/// What one report row fits and how it is judged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowSpec {
    pub label: String,
    pub p: LpExponent,
    pub k: usize,
    pub theory: f64,
    pub tolerance: f64,
    pub bound: FitBound,
    pub window: (f64, f64),
}

/// Which family of tolerances applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportKind {
    /// linear/radial data: two-sided, tolerance 0.1
    Linear,
    /// nonlinear box runs: one-sided, tolerance 0.25 (0.1 for `L^{4/3}`)
    Nonlinear,
}

/// `[5, min(80, 0.3·(L/2π)²·2/ν)]`: before the slowest torus mode takes over.
pub fn torus_window(box_length: f64, nu: f64) -> (f64, f64) {
    let cap = 0.3 * (box_length / (2.0 * std::f64::consts::PI)).powi(2) * 2.0 / nu;
    (5.0, cap.min(80.0))
}

/// Standard rows of a decay report.
pub fn report_rows(kind: ReportKind, window: (f64, f64)) -> Vec<RowSpec> {
    let (tol, bound) = match kind {
        ReportKind::Linear => (0.1, FitBound::TwoSided),
        ReportKind::Nonlinear => (0.25, FitBound::Lower),
    };
    let mut rows = Vec::new();
    for k in 0..3 {
        rows.push((LpExponent::Two, k));
    }
    for p in [LpExponent::Four, LpExponent::Infinity] {
        for k in 0..2 {
            rows.push((p, k));
        }
    }
    let mut out: Vec<RowSpec> = rows
        .into_iter()
        .map(|(p, k)| RowSpec {
            label: norm_label(k, p),
            p,
            k,
            theory: theory_rate(p, k),
            tolerance: tol,
            bound,
            window,
        })
        .collect();
    out.push(RowSpec {
        label: norm_label(0, LpExponent::FourThirds),
        p: LpExponent::FourThirds,
        k: 0,
        theory: BOOTSTRAP_RATE,
        tolerance: 0.1,
        bound: FitBound::Lower,
        window,
    });
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub quantity: String,
    pub p: LpExponent,
    pub k: usize,
    pub fit: DecayFit,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
}

impl DecayReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.fit.pass)
    }

    pub fn row(&self, quantity: &str) -> Option<&DecayRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }

    pub const CSV_HEADER: &'static str = "quantity,p,k,window_lo,window_hi,fitted,theory,r2,pass";

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            let f = &r.fit;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.quantity, r.p, r.k, f.window.0, f.window.1, f.fitted_rate, f.theory_rate, f.r_squared, f.pass
            )?;
        }
        Ok(())
    }
}

/// One algebraic fit per row spec against the matching series.
pub fn build_decay_report(series: &[NormSeries], rows: &[RowSpec]) -> Result<DecayReport> {
    let mut out = Vec::with_capacity(rows.len());
    for spec in rows {
        let s = series
            .iter()
            .find(|s| s.label == spec.label)
            .ok_or_else(|| Error::config(format!("no series labelled `{}`", spec.label)))?;
        let fit = fit_decay_bounded(s, DecayModel::Algebraic, spec.window, spec.theory, spec.tolerance, spec.bound)?;
        let diagnostic = fit.diagnostic();
        out.push(DecayRow { quantity: spec.label.clone(), p: spec.p, k: spec.k, fit, diagnostic });
    }
    Ok(DecayReport { rows: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apriori_examples() {
        assert_eq!(check_apriori_values(0.4, 0.05, 0.1, 0.0), AprioriStatus::Ok);
        assert!(matches!(
            check_apriori_values(0.6, 0.0, 0.1, 0.0),
            AprioriStatus::Violated { bound: AprioriBound::Uniform, .. }
        ));
        match check_apriori_values(0.07, 0.0, 0.1, 3.0) {
            AprioriStatus::Violated { bound: AprioriBound::Uniform, margin, limit, .. } => {
                assert!((limit - 0.0625).abs() < 1e-15);
                assert!((margin - 0.0075).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            check_apriori_values(0.0, 0.2, 0.1, 0.0),
            AprioriStatus::Violated { bound: AprioriBound::Gradient, .. }
        ));
    }

    #[test]
    fn theory_rates() {
        assert_eq!(theory_rate(LpExponent::Two, 0), 0.75);
        assert_eq!(theory_rate(LpExponent::Two, 2), 1.75);
        assert_eq!(theory_rate(LpExponent::Infinity, 0), 1.5);
        assert_eq!(theory_rate(LpExponent::Infinity, 1), 2.0);
    }

    #[test]
    fn torus_window_for_reference_box() {
        let (lo, hi) = torus_window(32.0 * std::f64::consts::PI, 2.0);
        assert_eq!(lo, 5.0);
        assert!((hi - 76.8).abs() < 1e-12);
    }
}
