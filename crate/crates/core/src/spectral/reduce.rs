//! Deterministic reductions.
//!
//! Every sum splits its index range at fixed midpoints down to a fixed leaf
//! size, so the rounding pattern does not depend on how many worker threads
//! rayon happens to use.

const LEAF: usize = 2048;

/// Pairwise sum of `f(i)` for `i` in `lo..hi`.
pub fn sum_by<F>(lo: usize, hi: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    if hi - lo <= LEAF {
        let mut acc = 0.0;
        for i in lo..hi {
            acc += f(i);
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    let (a, b) = rayon::join(|| sum_by(lo, mid, f), || sum_by(mid, hi, f));
    a + b
}

/// Maximum of `f(i)` over `lo..hi`; `0.0` for an empty range.
pub fn max_by<F>(lo: usize, hi: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    if hi - lo <= LEAF {
        return (lo..hi).map(f).fold(0.0, f64::max);
    }
    let mid = lo + (hi - lo) / 2;
    let (a, b) = rayon::join(|| max_by(lo, mid, f), || max_by(mid, hi, f));
    a.max(b)
}

/// Minimum of `f(i)` over `lo..hi`; `+∞` for an empty range.
pub fn min_by<F>(lo: usize, hi: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    if hi - lo <= LEAF {
        return (lo..hi).map(f).fold(f64::INFINITY, f64::min);
    }
    let mid = lo + (hi - lo) / 2;
    let (a, b) = rayon::join(|| min_by(lo, mid, f), || min_by(mid, hi, f));
    a.min(b)
}

pub fn sum(xs: &[f64]) -> f64 {
    sum_by(0, xs.len(), &|i| xs[i])
}
