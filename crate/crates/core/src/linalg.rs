//! Dense linear solves for square-wave fitting.
//!
//! A plain LU factorization with partial pivoting is all the fitting needs:
//! systems stay small (N <= [`MAX_SYSTEM`]) and well conditioned once the
//! wave anchor is placed correctly. Singular systems are reported with a
//! cheap condition estimate instead of silently returning garbage.

use alloc::vec;
use alloc::vec::Vec;


use crate::error::Error;
use crate::Result;

/// Largest supported system size.
pub const MAX_SYSTEM: usize = 512;

/// Solves `A x = b` for square row-major `A` (`n x n`) by LU factorization
/// with partial pivoting. `A` and `b` are consumed as scratch space.
///
/// Returns [`Error::SingularMatrix`] when a pivot underflows
/// `1e-13 * max|A|`, with a condition estimate from the ratio of the
/// largest to smallest pivot magnitude seen.
pub fn lu_solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > MAX_SYSTEM {
        return Err(Error::SystemTooLarge { requested: n, max: MAX_SYSTEM });
    }
    assert_eq!(a.len(), n * n, "matrix shape mismatch");
    assert_eq!(b.len(), n, "rhs length mismatch");

    let scale = a.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let tol = 1e-13 * scale.max(1e-300);
    let mut piv_max = 0.0f64;
    let mut piv_min = f64::INFINITY;

    for col in 0..n {
        // Partial pivot: largest magnitude in this column at or below row col.
        let mut best = col;
        let mut best_val = a[col * n + col].abs();
        for row in (col + 1)..n {
            let v = a[row * n + col].abs();
            if v > best_val {
                best = row;
                best_val = v;
            }
        }
        if best_val < tol {
            let cond = if piv_min > 0.0 && best_val > 0.0 {
                piv_max.max(best_val) / best_val
            } else {
                f64::INFINITY
            };
            return Err(Error::SingularMatrix { condition_estimate: cond });
        }
        if best != col {
            for j in 0..n {
                a.swap(col * n + j, best * n + j);
            }
            b.swap(col, best);
        }
        let pivot = a[col * n + col];
        piv_max = piv_max.max(pivot.abs());
        piv_min = piv_min.min(pivot.abs());
        for row in (col + 1)..n {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            a[row * n + col] = 0.0;
            for j in (col + 1)..n {
                a[row * n + j] -= factor * a[col * n + j];
            }
            b[row] -= factor * b[col];
        }
    }

    // Back substitution.
    let mut x = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in (row + 1)..n {
            acc -= a[row * n + j] * x[j];
        }
        x[row] = acc / a[row * n + row];
    }
    Ok(x)
}

/// Maximum-magnitude entry of `A x - b`; used to verify solve quality.
pub fn residual_inf(a: &[f64], x: &[f64], b: &[f64], n: usize) -> f64 {
    let mut worst = 0.0f64;
    for row in 0..n {
        let mut acc = -b[row];
        for j in 0..n {
            acc += a[row * n + j] * x[j];
        }
        worst = worst.max(acc.abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // [[2, 1], [1, 3]] x = [5, 10] -> x = [1, 3].
        let a = vec![2.0, 1.0, 1.0, 3.0];
        let b = vec![5.0, 10.0];
        let x = lu_solve(a.clone(), b.clone(), 2).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 3.0).abs() < 1e-14);
        assert!(residual_inf(&a, &x, &b, 2) < 1e-14);
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = vec![0.0, 1.0, 1.0, 0.0];
        let b = vec![2.0, 3.0];
        let x = lu_solve(a, b, 2).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-14);
        assert!((x[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn random_system_residual_small() {
        // Deterministic pseudo-random matrix via a simple LCG; checks the
        // solve against its own residual.
        let n = 64;
        let mut seed = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let a: Vec<f64> = (0..n * n).map(|_| next()).collect();
        let b: Vec<f64> = (0..n).map(|_| next()).collect();
        let x = lu_solve(a.clone(), b.clone(), n).unwrap();
        let bnorm = b.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        assert!(residual_inf(&a, &x, &b, n) < 1e-10 * bnorm.max(1.0));
    }

    #[test]
    fn singular_matrix_reports_condition() {
        let a = vec![1.0, 2.0, 2.0, 4.0];
        let b = vec![1.0, 2.0];
        match lu_solve(a, b, 2) {
            Err(Error::SingularMatrix { condition_estimate }) => {
                assert!(condition_estimate > 1e10);
            }
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn size_limits() {
        assert!(lu_solve(vec![], vec![], 0).is_err());
        let n = MAX_SYSTEM + 1;
        assert!(matches!(
            lu_solve(vec![0.0; n * n], vec![0.0; n], n),
            Err(Error::SystemTooLarge { .. })
        ));
    }
}
