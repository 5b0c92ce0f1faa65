use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::C64;

/// Cubic 3-D complex FFT built from batched 1-D transforms.
///
/// Data is row-major with the last axis contiguous. Each pass transforms the
/// contiguous axis and then cyclically rotates the axes; three passes return
/// the array to its original layout. Neither direction is normalized.
#[derive(Clone)]
pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft3 { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.run(data, &self.forward);
    }

    pub fn inverse(&self, data: &mut [C64]) {
        self.run(data, &self.inverse);
    }

    fn run(&self, data: &mut [C64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "Fft3 buffer has wrong length");
        let mut scratch_buf = vec![C64::new(0.0, 0.0); data.len()];
        let mut src: &mut [C64] = data;
        let mut dst: &mut [C64] = &mut scratch_buf;
        for _ in 0..3 {
            src.par_chunks_mut(n * n).for_each_init(
                || vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()],
                |scratch, plane| plan.process_with_scratch(plane, scratch),
            );
            rotate_axes(src, dst, n);
            std::mem::swap(&mut src, &mut dst);
        }
        // Three swaps leave the result in the scratch buffer.
        dst.copy_from_slice(src);
    }
}

/// `out[c][a][b] = inp[a][b][c]`.
fn rotate_axes(inp: &[C64], out: &mut [C64], n: usize) {
    const BLOCK: usize = 16;
    out.par_chunks_mut(n * n).enumerate().for_each(|(c, plane)| {
        for a0 in (0..n).step_by(BLOCK) {
            for b0 in (0..n).step_by(BLOCK) {
                for a in a0..(a0 + BLOCK).min(n) {
                    let row = &mut plane[a * n..(a + 1) * n];
                    for b in b0..(b0 + BLOCK).min(n) {
                        row[b] = inp[(a * n + b) * n + c];
                    }
                }
            }
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_dft(data: &[C64], n: usize, sign: f64) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); data.len()];
        for k0 in 0..n {
            for k1 in 0..n {
                for k2 in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for j0 in 0..n {
                        for j1 in 0..n {
                            for j2 in 0..n {
                                let phase = sign * 2.0 * PI * ((k0 * j0 + k1 * j1 + k2 * j2) as f64) / n as f64;
                                acc += data[(j0 * n + j1) * n + j2] * C64::from_polar(1.0, phase);
                            }
                        }
                    }
                    out[(k0 * n + k1) * n + k2] = acc;
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft() {
        let n = 4;
        let data: Vec<C64> = (0..n * n * n).map(|i| C64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos())).collect();
        let fft = Fft3::new(n);
        let mut fwd = data.clone();
        fft.forward(&mut fwd);
        let expected = naive_dft(&data, n, -1.0);
        for (a, b) in fwd.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-12);
        }
        let mut back = fwd.clone();
        fft.inverse(&mut back);
        for (a, b) in back.iter().zip(&data) {
            assert!((a / (n * n * n) as f64 - b).norm() < 1e-13);
        }
    }
}
