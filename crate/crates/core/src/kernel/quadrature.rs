//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Segment { a, b, value: kronrod * h, error: ((kronrod - gauss) * h).abs() }
}

/// `∫ₐᵇ f` split at `breakpoints`, refined until the summed error estimate is
/// below `rel_tol·|I| + abs_tol`.
pub fn integrate(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<(f64, f64)> {
    let mut cuts: Vec<f64> = vec![a];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);
    let mut segs: Vec<Segment> = cuts.windows(2).map(|w| gk15(f, w[0], w[1])).collect();
    loop {
        let value: f64 = segs.iter().map(|s| s.value).sum();
        let error: f64 = segs.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature { lo: a, hi: b, estimate: value, error });
        }
        if error <= rel_tol * value.abs() + abs_tol {
            return Ok((value, error));
        }
        if segs.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature { lo: a, hi: b, estimate: value, error });
        }
        let (worst, _) =
            segs.iter().enumerate().max_by(|x, y| x.1.error.total_cmp(&y.1.error)).expect("at least one segment");
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            return Err(Error::Quadrature { lo: a, hi: b, estimate: value, error });
        }
        segs.push(gk15(f, s.a, mid));
        segs.push(gk15(f, mid, s.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let (v, _) = integrate(&|x| 3.0 * x * x + x.powi(9), 0.0, 2.0, &[], 1e-14, 0.0).unwrap();
        assert!((v - (8.0 + 102.4)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_moment() {
        // ∫₀^∞ r² e^{−r²} dr = √π/4
        let (v, _) = integrate(&|r| r * r * (-r * r).exp(), 0.0, 12.0, &[1.0], 1e-12, 0.0).unwrap();
        assert!((v - std::f64::consts::PI.sqrt() / 4.0).abs() < 1e-13);
    }

    #[test]
    fn narrow_peak_is_found_with_breakpoints() {
        let f = |r: f64| (-((r - 0.03) / 0.002).powi(2)).exp();
        let (v, _) = integrate(&f, 0.0, 10.0, &[0.02, 0.03, 0.04], 1e-10, 0.0).unwrap();
        assert!((v - 0.002 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        assert!(matches!(integrate(&|x| 1.0 / x, -1.0, 1.0, &[], 1e-8, 0.0), Err(Error::Quadrature { .. })));
    }
}
