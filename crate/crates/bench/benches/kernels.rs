use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use greenprop::diagnostics::sample_norms;
use greenprop::experiment::{generate_initial, InitKind, InitSection};
use greenprop::green::{expm_oracle, sampling_plan, symbol, symbol_check};
use greenprop::integrator::{Scheme, Stepper};
use greenprop::kernel::{symbol_norm_radial, RadialMode, RadialOptions};
use greenprop::nonlinear::{evaluate_rhs_spectral, RhsOptions};
use greenprop::spectral::{forward_field, to_spectral, SpectralState};
use greenprop::{Part, ViscosityParams, WavenumberLattice};

fn params() -> ViscosityParams {
    ViscosityParams::new(1.0, 0.0, 1.05, 1.4).unwrap()
}

fn bump(lattice: &WavenumberLattice) -> SpectralState {
    let init = InitSection {
        kind: InitKind::GaussianBump,
        amplitude: 0.01,
        width_or_wavenumber: Some(lattice.box_length() / 16.0),
        seed: None,
        band: None,
        center: None,
    };
    to_spectral(&generate_initial(&init, lattice).unwrap(), lattice).unwrap()
}

fn symbol_eval(c: &mut Criterion) {
    let p = params();
    let mut g = c.benchmark_group("symbol");
    g.bench_function("closed_form", |b| b.iter(|| symbol(black_box(1.3), black_box([0.4, -1.1, 2.0]), &p).unwrap()));
    g.bench_function("expm_oracle", |b| {
        b.iter(|| expm_oracle(black_box(1.3), black_box([0.4, -1.1, 2.0]), &p).unwrap())
    });
    let plan = sampling_plan(100, 10, 3);
    g.bench_function("symbol_check_110", |b| b.iter(|| symbol_check(black_box(&plan)).unwrap()));
    g.finish();
}

fn radial(c: &mut Criterion) {
    let p = params();
    let opts = RadialOptions::default();
    c.bench_function("radial_low_l2_t50", |b| {
        b.iter(|| symbol_norm_radial(black_box(50.0), Part::Low, 1, RadialMode::L2Kernel, &p, &opts).unwrap())
    });
}

fn box_ops(c: &mut Criterion) {
    let p = params();
    let mut g = c.benchmark_group("box");
    g.sample_size(10);
    for n in [32, 64] {
        let lat = WavenumberLattice::new(n, 32.0 * std::f64::consts::PI).unwrap();
        let spec = bump(&lat);
        let field: Vec<f64> = (0..lat.len()).map(|i| (i as f64 * 0.37).sin()).collect();
        g.bench_with_input(BenchmarkId::new("fft_forward", n), &n, |b, _| {
            b.iter(|| forward_field(black_box(&field), &lat))
        });
        let opts = RhsOptions { vacuum_floor: 1e-6, keep_terms: false };
        g.bench_with_input(BenchmarkId::new("rhs", n), &n, |b, _| {
            b.iter(|| evaluate_rhs_spectral(black_box(&spec), &p, &lat, &opts).unwrap())
        });
        let stepper = Stepper::new(&lat, p, Scheme::Etdrk2, 0.05, false, 1e-6).unwrap();
        g.bench_with_input(BenchmarkId::new("etdrk2_step", n), &n, |b, _| {
            b.iter(|| stepper.step(black_box(&spec), 0).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sample_norms", n), &n, |b, _| {
            b.iter(|| sample_norms(black_box(&spec), &lat, 0.0).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, symbol_eval, radial, box_ops);
criterion_main!(benches);
