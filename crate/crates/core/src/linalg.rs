//! Small dense linear algebra: square matrices, symmetric eigenvalues by
//! cyclic Jacobi rotations, and LU solves with partial pivoting.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

/// Dense square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Matrix {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Panics unless `rows` is square.
    pub fn from_rows(rows: &[&[f64]]) -> Matrix {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            data.extend_from_slice(r);
        }
        Matrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                t[(k, i)] = self[(i, k)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[(i, k)] += a * other[(l, k)];
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|k| i == k || self[(i, k)] == 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Largest singular value, from the eigenvalues of `AᵀA`.
    pub fn spectral_norm(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let ata = self.transpose().matmul(self);
        let top = symmetric_eigenvalues(&ata)
            .into_iter()
            .fold(0.0f64, |acc, v| acc.max(v));
        libm::sqrt(top.max(0.0))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, k): (usize, usize)) -> &f64 {
        &self.data[i * self.n + k]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, k): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + k]
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps.
pub fn symmetric_eigenvalues(a: &Matrix) -> Vec<f64> {
    let n = a.n;
    let mut m = a.clone();
    for _sweep in 0..100 {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += m[(i, i)] * m[(i, i)];
            for k in 0..n {
                if i != k {
                    off += m[(i, k)] * m[(i, k)];
                }
            }
        }
        if off <= 1e-32 * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[(i, i)]).collect()
}

/// LU factorization with partial pivoting of a general `size × size`
/// row-major system.
pub struct Lu {
    size: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Returns `None` when a pivot falls below `rel_tol` times the largest
    /// entry of the input.
    pub fn factor(size: usize, mut a: Vec<f64>, rel_tol: f64) -> Option<Lu> {
        assert_eq!(a.len(), size * size);
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return None;
        }
        let mut perm: Vec<usize> = (0..size).collect();
        for col in 0..size {
            let (piv, pval) = (col..size)
                .map(|r| (r, a[r * size + col].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pval <= rel_tol * scale {
                return None;
            }
            if piv != col {
                for k in 0..size {
                    a.swap(col * size + k, piv * size + k);
                }
                perm.swap(col, piv);
            }
            let d = a[col * size + col];
            for r in (col + 1)..size {
                let factor = a[r * size + col] / d;
                if factor == 0.0 {
                    continue;
                }
                a[r * size + col] = factor;
                for k in (col + 1)..size {
                    a[r * size + k] -= factor * a[col * size + k];
                }
            }
        }
        Some(Lu { size, lu: a, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.size;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let mut s = x[r];
            for k in 0..r {
                s -= self.lu[r * n + k] * x[k];
            }
            x[r] = s;
        }
        for r in (0..n).rev() {
            let mut s = x[r];
            for k in (r + 1)..n {
                s -= self.lu[r * n + k] * x[k];
            }
            x[r] = s / self.lu[r * n + r];
        }
        x
    }
}
