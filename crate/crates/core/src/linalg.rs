//! Small dense complex matrices and a Hermitian eigensolver.
//!
//! The eigensolver is a cyclic complex Jacobi iteration. It is quadratically
//! convergent, needs no pivoting, and delivers eigenvalues with absolute
//! accuracy close to machine precision relative to the matrix norm, which is
//! what entropy evaluation near rank-deficient states needs. The matrices
//! seen in practice are at most a few dozen rows wide.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::C64;

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major data; `None` if the length is not a square.
    pub fn from_rows(dim: usize, data: Vec<C64>) -> Option<Self> {
        (data.len() == dim * dim).then_some(CMatrix { dim, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for (i, a) in v.iter().enumerate() {
            for (j, b) in v.iter().enumerate() {
                m.data[i * dim + j] = a * b.conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut out = Self::zeros(dim);
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                for k in 0..m {
                    for l in 0..m {
                        out.data[(i * m + k) * dim + j * m + l] = a * other.data[k * m + l];
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim, "add dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Largest elementwise `|a_ij - conj(a_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Largest elementwise `|a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x.norm_sqr()).sum::<f64>())
    }

    /// Rebuilds `V diag(values) V^dagger` from eigenpairs.
    pub fn from_eigen(values: &[f64], vectors: &CMatrix) -> CMatrix {
        let n = vectors.dim;
        let mut out = Self::zeros(n);
        for (k, &lambda) in values.iter().enumerate() {
            if lambda == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = vectors.data[i * n + k] * lambda;
                for j in 0..n {
                    out.data[i * n + j] += vik * vectors.data[j * n + k].conj();
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Eigenvalues in descending order with matching eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

const MAX_SWEEPS: usize = 100;

/// Diagonalizes a Hermitian matrix. Only the upper triangle's Hermitian
/// structure is assumed; callers check Hermiticity beforehand.
pub fn hermitian_eigen(matrix: &CMatrix) -> HermitianEigen {
    jacobi(matrix, true)
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(matrix: &CMatrix) -> Vec<f64> {
    jacobi(matrix, false).values
}

fn jacobi(matrix: &CMatrix, want_vectors: bool) -> HermitianEigen {
    let n = matrix.dim;
    let mut a = matrix.clone();
    // Symmetrize so that round-off in the input does not bias the result.
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = if want_vectors {
        CMatrix::identity(n)
    } else {
        CMatrix::zeros(0)
    };

    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if libm::sqrt(off) <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                // Phase that makes the (p, q) entry real and positive.
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]] on (p, q).
                let g_pp = C64::new(c, 0.0);
                let g_pq = C64::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;

                // A <- A G
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                // A <- G^dagger A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

                if want_vectors {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * g_pp + vkq * g_qp;
                        v[(k, q)] = vkp * g_pq + vkq * g_qq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = if want_vectors {
        let mut sorted = CMatrix::zeros(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for k in 0..n {
                sorted[(k, new_col)] = v[(k, old_col)];
            }
        }
        sorted
    } else {
        v
    };
    HermitianEigen { values, vectors }
}

/// Sum with pairwise recursion; the result depends only on the slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn two_by_two_block_with_half_coherence() {
        let m = CMatrix::from_rows(2, vec![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)]).unwrap();
        let ev = hermitian_eigenvalues(&m);
        assert!((ev[0] - 1.0).abs() < 1e-14);
        assert!(ev[1].abs() < 1e-14);
    }

    #[test]
    fn complex_two_by_two_matches_characteristic_polynomial() {
        // [[a, b], [b*, d]]: lambda = (a+d)/2 +- sqrt(((a-d)/2)^2 + |b|^2)
        let (a, d, b) = (0.3, 0.7, c(0.1, -0.2));
        let m = CMatrix::from_rows(2, vec![c(a, 0.0), b, b.conj(), c(d, 0.0)]).unwrap();
        let ev = hermitian_eigenvalues(&m);
        let r = libm::sqrt(((a - d) / 2.0) * ((a - d) / 2.0) + b.norm_sqr());
        assert!((ev[0] - ((a + d) / 2.0 + r)).abs() < 1e-14);
        assert!((ev[1] - ((a + d) / 2.0 - r)).abs() < 1e-14);
    }

    #[test]
    fn eigenvectors_diagonalize() {
        let data = vec![
            c(2.0, 0.0),
            c(0.5, 0.3),
            c(0.0, -1.0),
            c(0.5, -0.3),
            c(1.0, 0.0),
            c(0.2, 0.2),
            c(0.0, 1.0),
            c(0.2, -0.2),
            c(-1.0, 0.0),
        ];
        let m = CMatrix::from_rows(3, data).unwrap();
        let eig = hermitian_eigen(&m);
        let rebuilt = CMatrix::from_eigen(&eig.values, &eig.vectors);
        assert!(rebuilt.max_abs_diff(&m) < 1e-13);
        assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        let vv = eig.vectors.adjoint().matmul(&eig.vectors);
        assert!(vv.max_abs_diff(&CMatrix::identity(3)) < 1e-13);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_integers() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 4950.0);
    }
}
