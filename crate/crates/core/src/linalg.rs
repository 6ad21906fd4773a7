//! Dense symmetric positive-definite solve for the normal equations.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Solves `A x = b` for symmetric positive-definite `A` (row-major,
/// `p * p`) by an in-place Cholesky factorization. Returns `None` when a
/// pivot falls below a relative floor, i.e. the system is singular or
/// numerically indistinguishable from singular.
pub(crate) fn solve_spd(mut a: Vec<f64>, b: &[f64], p: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), p * p);
    debug_assert_eq!(b.len(), p);

    let max_diag = (0..p).map(|i| a[i * p + i].abs()).fold(0.0f64, f64::max);
    let pivot_floor = max_diag * 1e-12;

    // lower Cholesky factor, in place
    for j in 0..p {
        let mut diag = a[j * p + j];
        for k in 0..j {
            diag -= a[j * p + k] * a[j * p + k];
        }
        if !(diag > pivot_floor) {
            return None;
        }
        let ljj = diag.sqrt();
        a[j * p + j] = ljj;
        for i in (j + 1)..p {
            let mut s = a[i * p + j];
            for k in 0..j {
                s -= a[i * p + k] * a[j * p + k];
            }
            a[i * p + j] = s / ljj;
        }
    }

    // forward substitution: L y = b
    let mut x: Vec<f64> = b.to_vec();
    for i in 0..p {
        for k in 0..i {
            x[i] = x[i] - a[i * p + k] * x[k];
        }
        x[i] /= a[i * p + i];
    }
    // back substitution: L^T x = y
    for i in (0..p).rev() {
        for k in (i + 1)..p {
            x[i] = x[i] - a[k * p + i] * x[k];
        }
        x[i] /= a[i * p + i];
    }
    Some(x)
}
