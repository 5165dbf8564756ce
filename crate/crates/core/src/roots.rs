//! Bracketing and bisection in logarithmic coordinates.

use crate::error::{Error, Result};

/// Geometric grid of `n >= 2` points spanning `[lo, hi]`, endpoints included.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == n - 1 {
                hi
            } else {
                (a + (b - a) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Bisection on `ln x` for a sign change of `f` in `[lo, hi]`.
///
/// Requires `f(lo) < 0 <= f(hi)`. Returns the smallest located point `x`
/// with `f(x) >= 0`, to relative width `rel_tol`.
pub fn bisect_log<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    debug_assert!(f(lo) < 0.0 && f(hi) >= 0.0);
    // Relative width in x equals absolute width in ln x (to first order).
    for _ in 0..200 {
        if b - a <= rel_tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if f(mid.exp()) >= 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    b.exp()
}

/// Smallest `x` in `[lo, hi]` above which `f >= 0` holds on the scan grid.
///
/// Scans `n` log-spaced points, locates the last point where `f < 0` and
/// bisects between it and its successor. If `f >= 0` on the whole grid, `lo`
/// is returned; if `f < 0` at `hi`, there is no crossover in range.
pub fn last_crossing<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    n: usize,
    rel_tol: f64,
) -> Result<f64> {
    let grid = log_space(lo, hi, n);
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    match values.iter().rposition(|&v| v < 0.0 || v.is_nan()) {
        None => Ok(lo),
        Some(k) if k == n - 1 => Err(Error::NoCrossover { lo, hi }),
        Some(k) => Ok(bisect_log(f, grid[k], grid[k + 1], rel_tol)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_endpoints() {
        let g = log_space(1e-6, 1e12, 200);
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 1e-6);
        assert_eq!(g[199], 1e12);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn single_root() {
        let x = bisect_log(|x| x - 3.7, 1.0, 100.0, 1e-12);
        assert_relative_eq!(x, 3.7, max_relative = 1e-11);
    }

    #[test]
    fn picks_largest_crossing() {
        // Negative on (2, 5) and (20, 40), non-negative elsewhere.
        let f = |x: f64| if (2.0..5.0).contains(&x) || (20.0..40.0).contains(&x) { -1.0 } else { 1.0 };
        let x = last_crossing(f, 1e-3, 1e6, 200, 1e-9).unwrap();
        assert_relative_eq!(x, 40.0, max_relative = 1e-8);
    }

    #[test]
    fn no_crossing_and_always_nonnegative() {
        assert!(matches!(
            last_crossing(|_| -1.0, 1.0, 10.0, 20, 1e-6),
            Err(Error::NoCrossover { .. })
        ));
        assert_eq!(last_crossing(|_| 1.0, 1.0, 10.0, 20, 1e-6).unwrap(), 1.0);
    }
}
