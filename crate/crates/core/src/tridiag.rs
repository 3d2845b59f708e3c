//! Thomas algorithm for tridiagonal systems.

use crate::error::{Error, Result};

/// Solves `A x = rhs` where `A` has main diagonal `diag`, sub-diagonal
/// `lower` (`lower[i] = A[i+1][i]`) and super-diagonal `upper`
/// (`upper[i] = A[i][i+1]`).
///
/// No pivoting is done, so `A` should be diagonally dominant or symmetric
/// positive definite.
pub fn solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if rhs.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: rhs.len(),
        });
    }
    let off = n.saturating_sub(1);
    for len in [lower.len(), upper.len()] {
        if len != off {
            return Err(Error::LengthMismatch {
                expected: off,
                actual: len,
            });
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    // Forward sweep: c' holds the modified super-diagonal, d' the rhs.
    let mut c = vec![0.0; off];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 {
        return Err(Error::SingularSystem(0));
    }
    if off > 0 {
        c[0] = upper[0] / pivot;
    }
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i - 1] * c[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::SingularSystem(i));
        }
        if i < off {
            c[i] = upper[i] / pivot;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / pivot;
    }

    for i in (0..off).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// `A x` for the same banded layout as [`solve`].
pub fn multiply(lower: &[f64], diag: &[f64], upper: &[f64], x: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut v = diag[i] * x[i];
            if i > 0 {
                v += lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += upper[i] * x[i + 1];
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense Gaussian elimination with partial pivoting.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())
                .unwrap();
            a.swap(k, p);
            b.swap(k, p);
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    #[test]
    fn matches_dense_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1usize, 2, 3, 8, 40] {
            let lower: Vec<f64> = (0..n.saturating_sub(1)).map(|_| rng.random_range(-1.0..1.0)).collect();
            let upper: Vec<f64> = (0..n.saturating_sub(1)).map(|_| rng.random_range(-1.0..1.0)).collect();
            let diag: Vec<f64> = (0..n).map(|_| rng.random_range(2.5..4.0)).collect();
            let rhs: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();

            let mut dense = vec![vec![0.0; n]; n];
            for i in 0..n {
                dense[i][i] = diag[i];
                if i + 1 < n {
                    dense[i][i + 1] = upper[i];
                    dense[i + 1][i] = lower[i];
                }
            }
            let expected = dense_solve(dense, rhs.clone());
            let got = solve(&lower, &diag, &upper, &rhs).unwrap();
            for (g, e) in got.iter().zip(&expected) {
                assert!((g - e).abs() < 1e-10, "n={n}: {g} vs {e}");
            }
            let back = multiply(&lower, &diag, &upper, &got);
            for (r, b) in back.iter().zip(&rhs) {
                assert!((r - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_bad_lengths_and_zero_pivot() {
        assert!(solve(&[1.0], &[1.0, 1.0], &[], &[1.0, 1.0]).is_err());
        assert!(solve(&[], &[1.0], &[], &[1.0, 2.0]).is_err());
        assert!(matches!(
            solve(&[1.0], &[0.0, 1.0], &[1.0], &[1.0, 1.0]),
            Err(Error::SingularSystem(0))
        ));
    }
}
