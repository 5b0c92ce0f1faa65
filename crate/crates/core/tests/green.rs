use proptest::prelude::*;

use greenprop::green::{cutoff_chi, eigenvalues, expm_oracle, stable_entries, symbol, symbol_part, symbol_parts, Part};
use greenprop::{ViscosityParams, C64};

fn params(nu: f64) -> ViscosityParams {
    ViscosityParams::new(nu / 2.0, 0.0, 1.0, 1.4).unwrap()
}

/// `(ν, r, t, m, g₋, g₊)` from `oracles/stable_entries.py` (mpmath, 40 digits).
const FROZEN: [(f64, f64, f64, f64, f64, f64); 6] = [
    (2.0, 2.0, 0.5, 0.10695456513013967, 0.82226342390180952, -0.033373097139307875),
    (2.0, 1.0, 0.5, 0.30326532985631671, 0.90979598956895014, 0.30326532985631671),
    (2.0, 0.5, 3.0, 1.0508488626703806, 0.38950746544257191, -0.1359169658926184),
    (2.0, 1.000001, 2.0, 0.27066984468627516, 0.40600566926320879, -0.13533510278926162),
    (2.0, 10.0, 3.0, 0.0011170532735245247, 0.22285072472602516, -0.00055992997887977426),
    (0.7, 4.0, 1.5, 0.010252199697893642, 0.097593200335708682, -0.017231436280700106),
];

#[test]
fn stable_entries_match_frozen_high_precision_values() {
    for &(nu, r, t, m, gm, gp) in &FROZEN {
        let e = stable_entries(t, r, &params(nu));
        for (got, want, name) in [(e.m, m, "m"), (e.g_minus, gm, "g-"), (e.g_plus, gp, "g+")] {
            assert!(got.im.abs() < 1e-15, "{name} at ν={nu}, r={r}: {got}");
            assert!(
                (got.re - want).abs() <= 1e-13 * want.abs().max(1e-3),
                "{name} at ν={nu}, r={r}, t={t}: {} vs {want}",
                got.re
            );
        }
    }
}

#[test]
fn eigenvalue_regimes() {
    let p = params(2.0);
    assert!(!eigenvalues(0.5, &p).is_real());
    assert!(eigenvalues(3.0, &p).is_real());
    let double = eigenvalues(1.0, &p);
    assert!((double.lambda_plus - C64::new(-1.0, 0.0)).norm() < 1e-15);
    // λ₊ tends to −1/ν from below
    let far = eigenvalues(1e4, &p);
    assert!((far.lambda_plus.re + 0.5).abs() < 1e-7 && far.lambda_plus.re < -0.5);
}

#[test]
fn high_frequency_limit_of_singular_coefficient() {
    // at large |ξ| the singular part carries e^{−t/ν} on the density
    let p = params(2.0);
    let t = 3.0;
    let hs = symbol_part(t, [40.0, 0.0, 0.0], &p, Part::HighSingular).unwrap();
    assert!((hs.entries[(0, 0)].re / (-t / 2.0f64).exp() - 1.0).abs() < 1e-3);
}

#[test]
fn cutoff_profile() {
    assert_eq!(cutoff_chi(0.0), 1.0);
    assert_eq!(cutoff_chi(0.5), 1.0);
    assert_eq!(cutoff_chi(1.0 + 1e-12), 0.0);
    let mid = cutoff_chi(0.75);
    assert!(mid > 0.0 && mid < 1.0);
    let mut last = 1.0;
    for i in 0..=100 {
        let v = cutoff_chi(i as f64 / 100.0 * 1.2);
        assert!(v <= last + 1e-15);
        last = v;
    }
}

#[test]
fn rejects_negative_time() {
    assert!(symbol(-1.0, [1.0, 0.0, 0.0], &params(2.0)).is_err());
    assert!(symbol(f64::NAN, [1.0, 0.0, 0.0], &params(2.0)).is_err());
}

fn arb_params() -> impl Strategy<Value = ViscosityParams> {
    (0.05f64..3.0, -0.5f64..1.0)
        .prop_filter_map("admissible", |(mu, l)| ViscosityParams::new(mu, l * mu, 1.0, 1.4).ok())
}

fn arb_xi() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-6.0f64..6.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn symbol_agrees_with_matrix_exponential(p in arb_params(), xi in arb_xi(), t in 0.0f64..5.0) {
        let closed = symbol(t, xi, &p).unwrap().entries;
        let oracle = expm_oracle(t, xi, &p).unwrap();
        let err = (closed - oracle).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-8, "err = {err:e}");
    }

    #[test]
    fn semigroup_property(p in arb_params(), xi in arb_xi(), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let a = symbol(s, xi, &p).unwrap().entries;
        let b = symbol(t, xi, &p).unwrap().entries;
        let ab = symbol(s + t, xi, &p).unwrap().entries;
        let err = (a * b - ab).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-10, "err = {err:e}");
    }

    #[test]
    fn contraction(p in arb_params(), xi in arb_xi(), t in 0.0f64..5.0) {
        prop_assert!(symbol(t, xi, &p).unwrap().operator_norm() <= 1.0 + 1e-10);
    }

    #[test]
    fn reality_symmetry(p in arb_params(), xi in arb_xi(), t in 0.0f64..5.0) {
        let a = symbol(t, xi, &p).unwrap().entries;
        let b = symbol(t, [-xi[0], -xi[1], -xi[2]], &p).unwrap().entries;
        let err = (a.map(|z| z.conj()) - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12);
    }

    #[test]
    fn parts_sum_to_full(p in arb_params(), xi in arb_xi(), t in 0.0f64..5.0) {
        let full = symbol(t, xi, &p).unwrap().entries;
        let (l, hr, hs) = symbol_parts(t, xi, &p).unwrap();
        let err = (l.entries + hr.entries + hs.entries - full).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12);
    }

    #[test]
    fn vieta_relations(p in arb_params(), r in 0.0f64..50.0) {
        let e = eigenvalues(r, &p);
        let sum = e.lambda_plus + e.lambda_minus;
        let prod = e.lambda_plus * e.lambda_minus;
        let scale = 1.0 + p.nu() * r * r;
        prop_assert!((sum.re + p.nu() * r * r).abs() <= 1e-12 * scale && sum.im.abs() <= 1e-12 * scale);
        prop_assert!((prod - C64::new(r * r, 0.0)).norm() <= 1e-12 * (1.0 + r * r));
    }

    #[test]
    fn continuous_across_double_root(p in arb_params(), t in 0.1f64..5.0, off in 1e-9f64..1e-5) {
        let rc = p.confluent_radius();
        // entries are smooth in r, so the second difference is O(off²); a
        // branch mismatch at the double root would show up as O(√off)
        let a = stable_entries(t, rc - off, &p);
        let c = stable_entries(t, rc, &p);
        let b = stable_entries(t, rc + off, &p);
        for (x, m, y) in [(a.m, c.m, b.m), (a.g_minus, c.g_minus, b.g_minus), (a.g_plus, c.g_plus, b.g_plus)] {
            prop_assert!((x - 2.0 * m + y).norm() <= 1e4 * off * off + 1e-12, "{x} {m} {y}");
        }
    }
}
