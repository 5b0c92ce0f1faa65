use std::f64::consts::PI;

use proptest::prelude::*;

use greenprop::diagnostics::{build_decay_report, check_apriori, report_rows, sample_norms, ReportKind, RowSpec};
use greenprop::kernel::FitBound;
use greenprop::spectral::{random_band_state, to_spectral, PhysicalState, SpectralState};
use greenprop::{LpExponent, NormSeries, WavenumberLattice};

fn lattice() -> WavenumberLattice {
    WavenumberLattice::new(16, 2.0 * PI).unwrap()
}

fn coords(lat: &WavenumberLattice, idx: usize) -> [f64; 3] {
    let n = lat.n();
    let h = lat.spacing();
    [(idx / (n * n)) as f64 * h, ((idx / n) % n) as f64 * h, (idx % n) as f64 * h]
}

#[test]
fn equilibrium_has_zero_norms() {
    let lat = lattice();
    let b = sample_norms(&SpectralState::zeros(lat.len()), &lat, 0.0).unwrap();
    assert_eq!(b.seminorms, [0.0; 3]);
    assert!(b.lp.iter().all(|x| x.2 == 0.0));
    assert_eq!(b.sup(), 0.0);
    assert_eq!(b.resolved_fraction, 1.0);
}

#[test]
fn single_mode_closed_forms() {
    // ϱ = a·cos(2x + y): |ξ| = √5, ‖ϱ‖² = a²|Ω|/2, ‖ϱ‖⁴_4 = 3a⁴|Ω|/8
    let lat = lattice();
    let a = 0.3;
    let mut st = PhysicalState::zeros(lat.len());
    for (i, r) in st.rho.iter_mut().enumerate() {
        let x = coords(&lat, i);
        *r = a * (2.0 * x[0] + x[1]).cos();
    }
    let b = sample_norms(&to_spectral(&st, &lat).unwrap(), &lat, 0.0).unwrap();
    let vol = (2.0 * PI).powi(3);
    let l2 = a * (vol / 2.0).sqrt();
    let m = 5f64.sqrt();
    for k in 0..3 {
        assert!((b.seminorms[k] - l2 * m.powi(k as i32)).abs() < 1e-10 * l2 * 5.0, "k = {k}");
    }
    assert!((b.lp(LpExponent::Two, 0).unwrap() - l2).abs() < 1e-10);
    assert!((b.lp(LpExponent::Infinity, 0).unwrap() - a).abs() < 1e-10);
    assert!((b.lp(LpExponent::Four, 0).unwrap() - a * (3.0 * vol / 8.0).powf(0.25)).abs() < 1e-10);
    assert!((b.sup_gradient() - a * m).abs() < 1e-10);
    assert!((b.resolved_fraction - 1.0).abs() < 1e-15);
}

#[test]
fn mean_is_excluded_from_decay_norms() {
    let lat = lattice();
    let mut st = PhysicalState::zeros(lat.len());
    st.rho.iter_mut().for_each(|r| *r = 0.01);
    st.velocity[1].iter_mut().for_each(|u| *u = -0.02);
    let b = sample_norms(&to_spectral(&st, &lat).unwrap(), &lat, 1.0).unwrap();
    assert!(b.seminorms[0] < 1e-15);
    assert!((b.mean[0] - 0.01).abs() < 1e-15 && (b.mean[2] + 0.02).abs() < 1e-15);
    assert!((b.sup() - 0.0005f64.sqrt()).abs() < 1e-14);
}

#[test]
fn gradient_norm_two_ways() {
    let lat = WavenumberLattice::new(24, 7.0).unwrap();
    for seed in 0..4 {
        let st = random_band_state(&lat, [0.5, 5.0], 0.1, seed).unwrap();
        let b = sample_norms(&to_spectral(&st, &lat).unwrap(), &lat, 0.0).unwrap();
        let via_fields = b.lp(LpExponent::Two, 1).unwrap();
        assert!((b.seminorms[1] - via_fields).abs() <= 1e-10 * via_fields, "seed {seed}");
        assert!((b.seminorms[0] - 0.1).abs() < 1e-12);
    }
}

fn bundle_for(amplitude: f64) -> greenprop::diagnostics::NormBundle {
    let lat = lattice();
    let mut st = PhysicalState::zeros(lat.len());
    for (i, r) in st.rho.iter_mut().enumerate() {
        let x = coords(&lat, i);
        *r = amplitude * x[0].sin();
    }
    sample_norms(&to_spectral(&st, &lat).unwrap(), &lat, 0.0).unwrap()
}

proptest! {
    #[test]
    fn apriori_is_monotone_in_sup_scaling(amp in 0.0f64..0.2, factor in 1.0f64..20.0, t in 0.0f64..10.0, eta in 0.01f64..0.5) {
        let b = bundle_for(amp);
        let before = check_apriori(&b, eta, t).is_ok();
        let after = check_apriori(&b.with_scaled_sup(factor), eta, t).is_ok();
        prop_assert!(before || !after);
    }
}

fn series(label: &str, p: LpExponent, k: usize, f: impl Fn(f64) -> f64) -> NormSeries {
    let times: Vec<f64> = (0..60).map(|i| 5.0 + i as f64 * 75.0 / 59.0).collect();
    let values = times.iter().map(|&t| f(t)).collect();
    NormSeries::new(label, p, k, times, values).unwrap()
}

#[test]
fn exact_power_law_row_passes() {
    let s = series("D1V_Linf", LpExponent::Infinity, 1, |t| (1.0 + t).powi(-2));
    let rows: Vec<RowSpec> =
        report_rows(ReportKind::Linear, (5.0, 80.0)).into_iter().filter(|r| r.label == "D1V_Linf").collect();
    let rep = build_decay_report(&[s], &rows).unwrap();
    let row = rep.row("D1V_Linf").unwrap();
    assert!((row.fit.fitted_rate - 2.0).abs() < 1e-10);
    assert!(row.fit.pass && row.diagnostic.is_none());
}

#[test]
fn torus_crossover_row_fails_with_diagnostic() {
    // slowest torus mode k_min = 2π/L with L = 4π, ν = 2
    let kmin = 0.5f64;
    let s =
        series("D0V_L2", LpExponent::Two, 0, |t| (-2.0 * kmin * kmin * t / 2.0).exp() * 4.0 + (1.0 + t).powf(-0.75));
    let rows: Vec<RowSpec> =
        report_rows(ReportKind::Linear, (5.0, 80.0)).into_iter().filter(|r| r.label == "D0V_L2").collect();
    let rep = build_decay_report(&[s], &rows).unwrap();
    let row = rep.row("D0V_L2").unwrap();
    assert!(row.fit.r_squared < 0.98, "r2 = {}", row.fit.r_squared);
    assert!(!row.fit.pass);
    assert!(row.diagnostic.is_some());
    assert!(!rep.all_pass());
}

#[test]
fn bootstrap_row_is_one_sided() {
    let rows = report_rows(ReportKind::Nonlinear, (5.0, 80.0));
    let row = rows.iter().find(|r| r.label == "D0V_L4/3").unwrap();
    assert_eq!(row.bound, FitBound::Lower);
    assert!((row.theory - 7.0 / 40.0).abs() < 1e-15);
    // a faster decay than the bound passes
    let s = series("D0V_L4/3", LpExponent::FourThirds, 0, |t| (1.0 + t).powf(-0.6));
    let rep = build_decay_report(&[s], std::slice::from_ref(row)).unwrap();
    assert!(rep.rows[0].fit.pass);
}

#[test]
fn csv_layout() {
    let s = series("D0V_L2", LpExponent::Two, 0, |t| (1.0 + t).powf(-0.75));
    let rows: Vec<RowSpec> =
        report_rows(ReportKind::Linear, (5.0, 80.0)).into_iter().filter(|r| r.label == "D0V_L2").collect();
    let rep = build_decay_report(&[s], &rows).unwrap();
    let mut out = Vec::new();
    rep.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "quantity,p,k,window_lo,window_hi,fitted,theory,r2,pass");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "D0V_L2");
    assert_eq!(row[8], "true");
}
