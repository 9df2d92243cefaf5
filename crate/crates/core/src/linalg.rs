//! Small dense linear algebra: LU solve for the collocation stages and a
//! truncated-SVD least-squares solver for the coefficient fit.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::FloatExt;

/// Solve `A x = b` in place (`a` is `n×n` row-major, overwritten; `b`
/// receives `x`). Gaussian elimination with partial pivoting.
pub fn solve_in_place(a: &mut [f64], b: &mut [f64], n: usize) -> Result<()> {
    debug_assert_eq!(a.len(), n * n);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return Err(Error::InvalidInput("singular linear system"));
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / d;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col * n + k] * b[k];
        }
        b[col] = s / a[col * n + col];
    }
    Ok(())
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) * x[c]).sum())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    /// Number of singular values kept.
    pub rank: usize,
    /// Singular values of the column-equilibrated matrix, descending.
    pub singular_values: Vec<f64>,
    /// `‖A x - r‖₂`.
    pub residual_norm: f64,
}

/// Minimise `‖A x - r‖₂` for `rows >= cols`.
///
/// Columns are scaled to unit norm, then Householder QR reduces the problem
/// to `R y = Qᵀ r`, which is solved through a one-sided Jacobi SVD of `R`,
/// discarding singular values below `rel_cut · σ_max`.
pub fn least_squares(a: &Matrix, r: &[f64], rel_cut: f64) -> Result<LeastSquares> {
    let (m, n) = (a.rows, a.cols);
    if m < n || r.len() != m {
        return Err(Error::InvalidInput("least squares needs rows >= cols"));
    }
    let mut w = a.clone();
    let mut col_scale = vec![1.0; n];
    for (c, scale) in col_scale.iter_mut().enumerate() {
        let norm = (0..m).map(|i| w.get(i, c).powi(2)).sum::<f64>().sqrt();
        if norm > 0.0 {
            *scale = norm;
            for i in 0..m {
                w.set(i, c, w.get(i, c) / norm);
            }
        }
    }
    let mut rhs = r.to_vec();

    // Householder QR, applying reflectors to rhs as we go.
    for k in 0..n {
        let norm = (k..m).map(|i| w.get(i, k).powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = -norm.copysign(w.get(k, k));
        let mut v: Vec<f64> = (k..m).map(|i| w.get(i, k)).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for c in k..n {
            let dot: f64 = (k..m).map(|i| v[i - k] * w.get(i, c)).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..m {
                w.set(i, c, w.get(i, c) - f * v[i - k]);
            }
        }
        let dot: f64 = (k..m).map(|i| v[i - k] * rhs[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in k..m {
            rhs[i] -= f * v[i - k];
        }
    }
    let tail_norm = rhs[n..].iter().map(|x| x * x).sum::<f64>().sqrt();

    // One-sided Jacobi SVD of the n×n upper triangle: R V = U Σ.
    let mut u = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            u.set(i, j, w.get(i, j));
        }
    }
    let mut v = Matrix::zeros(n, n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..n {
                    let (up, uq) = (u.get(i, p), u.get(i, q));
                    alpha += up * up;
                    beta += uq * uq;
                    gamma += up * uq;
                }
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = 1.0f64.copysign(zeta) / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let (up, uq) = (u.get(i, p), u.get(i, q));
                    u.set(i, p, c * up - s * uq);
                    u.set(i, q, s * up + c * uq);
                    let (vp, vq) = (v.get(i, p), v.get(i, q));
                    v.set(i, p, c * vp - s * vq);
                    v.set(i, q, s * vp + c * vq);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| u.get(i, j).powi(2)).sum::<f64>().sqrt())
        .collect();
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let mut y = vec![0.0; n];
    let mut rank = 0;
    let mut dropped_sq = 0.0;
    for j in 0..n {
        let uty: f64 = (0..n).map(|i| u.get(i, j) * rhs[i]).sum::<f64>();
        if sigma[j] > rel_cut * smax && sigma[j] > 0.0 {
            rank += 1;
            // u columns carry σ; divide twice.
            let coef = uty / (sigma[j] * sigma[j]);
            for (i, yi) in y.iter_mut().enumerate() {
                *yi += v.get(i, j) * coef;
            }
        } else if sigma[j] > 0.0 {
            dropped_sq += (uty / sigma[j]).powi(2);
        }
    }
    let solution: Vec<f64> = y.iter().zip(&col_scale).map(|(yi, s)| yi / s).collect();
    let mut sv = sigma;
    sv.sort_by(|p, q| q.total_cmp(p));
    Ok(LeastSquares {
        solution,
        rank,
        singular_values: sv,
        residual_norm: (tail_norm * tail_norm + dropped_sq).sqrt(),
    })
}
