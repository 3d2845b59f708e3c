//! Histogram-modification cost and its closed-form minimizers.
//!
//! For an input histogram `h_i`, a uniform target `u` and weights
//! `lambda, gamma >= 0` the cost of a candidate histogram `h` is
//!
//! ```text
//! ||h - h_i||^2 + lambda ||h - u||^2 + gamma ||D h||^2
//! ```
//!
//! where `D` is the backward-difference operator. The cost is a strictly
//! convex quadratic; its minimizer solves the tridiagonal SPD system
//! `((1 + lambda) I + gamma D^T D) h = h_i + lambda u`.

use crate::error::{Error, Result};
use crate::histogram::{Histogram, LEVELS};
use crate::tridiag;

/// Backward-difference operator on 256-bin histograms. Row 0 is zero; row
/// `i > 0` computes `h[i] - h[i-1]`. Never stored densely.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DiffMatrix;

impl DiffMatrix {
    pub fn apply(&self, h: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; h.len()];
        for i in 1..h.len() {
            out[i] = h[i] - h[i - 1];
        }
        out
    }

    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let mut out = vec![0.0; n];
        for j in 0..n {
            if j >= 1 {
                out[j] += v[j];
            }
            if j + 1 < n {
                out[j] -= v[j + 1];
            }
        }
        out
    }

    /// `D^T D` as (sub-diagonal, diagonal, super-diagonal) of length `n`.
    pub fn gram(&self, n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut diag = vec![2.0; n];
        if n > 0 {
            diag[0] = 1.0;
            diag[n - 1] = 1.0;
        }
        let off = vec![-1.0; n.saturating_sub(1)];
        (off.clone(), diag, off)
    }

    pub fn squared_norm(&self, h: &[f64]) -> f64 {
        h.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum()
    }
}

/// The weighted histogram-modification problem for one image.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSpec {
    h_input: Histogram,
    u_target: Histogram,
    lambda: f64,
    gamma: f64,
}

impl ObjectiveSpec {
    /// The uniform target carries the same total mass as `h_input`.
    pub fn new(h_input: Histogram, lambda: f64, gamma: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidParameter(format!("gamma must be >= 0, got {gamma}")));
        }
        let u_target = Histogram::uniform(h_input.total());
        Ok(Self {
            h_input,
            u_target,
            lambda,
            gamma,
        })
    }

    pub fn h_input(&self) -> &Histogram {
        &self.h_input
    }

    pub fn u_target(&self) -> &Histogram {
        &self.u_target
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn check_len(h: &[f64]) -> Result<()> {
        if h.len() != LEVELS {
            return Err(Error::LengthMismatch {
                expected: LEVELS,
                actual: h.len(),
            });
        }
        Ok(())
    }

    pub fn tri_cost(&self, h: &[f64]) -> Result<f64> {
        Self::check_len(h)?;
        let hi = self.h_input.counts();
        let u = self.u_target.counts();
        let mut fidelity = 0.0;
        let mut uniformity = 0.0;
        for k in 0..LEVELS {
            fidelity += (h[k] - hi[k]).powi(2);
            uniformity += (h[k] - u[k]).powi(2);
        }
        let smoothness = if self.gamma == 0.0 {
            0.0
        } else {
            DiffMatrix.squared_norm(h)
        };
        Ok(fidelity + self.lambda * uniformity + self.gamma * smoothness)
    }

    /// `(h_i + lambda u) / (1 + lambda)`; gamma is ignored.
    pub fn closed_form_bicriteria(&self) -> Vec<f64> {
        let w = 1.0 + self.lambda;
        self.h_input
            .counts()
            .iter()
            .zip(self.u_target.counts())
            .map(|(&h, &u)| (h + self.lambda * u) / w)
            .collect()
    }

    /// Banded form of `(1 + lambda) I + gamma D^T D`.
    pub fn system_matrix(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (lower, gram_diag, upper) = DiffMatrix.gram(LEVELS);
        let diag = gram_diag
            .iter()
            .map(|&d| 1.0 + self.lambda + self.gamma * d)
            .collect();
        let scale = |v: Vec<f64>| v.into_iter().map(|x| self.gamma * x).collect::<Vec<_>>();
        (scale(lower), diag, scale(upper))
    }

    /// `h_i + lambda u`.
    pub fn rhs(&self) -> Vec<f64> {
        self.h_input
            .counts()
            .iter()
            .zip(self.u_target.counts())
            .map(|(&h, &u)| h + self.lambda * u)
            .collect()
    }

    /// Global minimizer of [`tri_cost`](Self::tri_cost).
    pub fn closed_form_tricriteria(&self) -> Vec<f64> {
        let (lower, diag, upper) = self.system_matrix();
        // Every pivot is >= 1 + lambda for this matrix, so the solve cannot fail.
        tridiag::solve(&lower, &diag, &upper, &self.rhs())
            .expect("system matrix is positive definite")
    }

    /// `||A h - b||_inf`, for checking solutions.
    pub fn residual_inf(&self, h: &[f64]) -> Result<f64> {
        Self::check_len(h)?;
        let (lower, diag, upper) = self.system_matrix();
        let ah = tridiag::multiply(&lower, &diag, &upper, h);
        Ok(ah
            .iter()
            .zip(self.rhs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `2 (h - h_i) + 2 lambda (h - u) + 2 gamma D^T D h`.
    pub fn gradient(&self, h: &[f64]) -> Result<Vec<f64>> {
        Self::check_len(h)?;
        let hi = self.h_input.counts();
        let u = self.u_target.counts();
        let smooth = DiffMatrix.apply_transpose(&DiffMatrix.apply(h));
        Ok((0..LEVELS)
            .map(|k| {
                2.0 * (h[k] - hi[k]) + 2.0 * self.lambda * (h[k] - u[k]) + 2.0 * self.gamma * smooth[k]
            })
            .collect())
    }
}

/// Euclidean distance between two histogram vectors.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}
