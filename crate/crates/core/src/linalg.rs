//! Minimal dense real matrices: just what the density-matrix oracles and the
//! perturbation blocks need. Row-major storage, cyclic Jacobi eigensolver for
//! symmetric matrices, reduced-row-echelon null spaces, and the scale/shift
//! least-squares fit used to compare against reference blocks.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Gram matrix `self * self^T`, exactly symmetric by construction.
    pub fn gram(&self) -> Mat {
        let n = self.rows;
        let mut out = Mat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let d = dot(self.row(i), self.row(j));
                out[(i, j)] = d;
                out[(j, i)] = d;
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        let mut t = 0.0;
        for i in 0..self.rows.min(self.cols) {
            t += self[(i, i)];
        }
        t
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        dot(&self.data, &self.data)
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0;
        for &x in &self.data {
            m = math::max(m, math::abs(x));
        }
        m
    }

    /// Largest absolute deviation from symmetry.
    pub fn asymmetry(&self) -> f64 {
        debug_assert_eq!(self.rows, self.cols);
        let mut worst = 0.0;
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                worst = math::max(worst, math::abs(self[(i, j)] - self[(j, i)]));
            }
        }
        worst
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for k in 0..a.len() {
        acc += a[k] * b[k];
    }
    acc
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as the columns of the returned matrix.
pub fn sym_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    debug_assert_eq!(a.rows, a.cols);
    debug_assert!(a.asymmetry() <= 1e-10 * a.max_abs().max(1.0));
    let n = a.rows;
    let mut m = a.clone();
    let mut v = Mat::identity(n);

    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off <= 1e-26 * m.frobenius_norm_sq().max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                // Stable tangent of the rotation angle.
                let t = if theta >= 0.0 {
                    1.0 / (theta + math::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + math::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, new_col)] = v[(k, old_col)];
        }
    }
    (eigenvalues, vectors)
}

/// Normalized basis of the null space of `b`, via Gaussian elimination to
/// reduced row-echelon form with partial pivoting.
///
/// The basis follows the echelon convention: one vector per free column,
/// seeded with a unit entry in that column. The vectors are normalized but
/// deliberately not orthogonalized against each other; the convention is what
/// fixes degenerate-subspace representatives deterministically.
pub fn rref_nullspace(b: &Mat, tol: f64) -> Vec<Vec<f64>> {
    let rows = b.rows;
    let cols = b.cols;
    let mut m = b.clone();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut rank = 0usize;

    for col in 0..cols {
        // Partial pivot below the current rank.
        if rank >= rows {
            continue;
        }
        let mut best = rank;
        for r in rank..rows {
            if math::abs(m[(r, col)]) > math::abs(m[(best, col)]) {
                best = r;
            }
        }
        if math::abs(m[(best, col)]) <= tol {
            continue;
        }
        if best != rank {
            for c in 0..cols {
                let tmp = m[(rank, c)];
                m[(rank, c)] = m[(best, c)];
                m[(best, c)] = tmp;
            }
        }
        let piv = m[(rank, col)];
        for c in 0..cols {
            m[(rank, c)] /= piv;
        }
        for r in 0..rows {
            if r != rank {
                let factor = m[(r, col)];
                if factor != 0.0 {
                    for c in 0..cols {
                        m[(r, c)] -= factor * m[(rank, c)];
                    }
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }

    let mut basis = Vec::new();
    for col in 0..cols {
        if pivot_cols.contains(&col) {
            continue;
        }
        let mut vec = vec![0.0; cols];
        vec[col] = 1.0;
        for (r, &pc) in pivot_cols.iter().enumerate() {
            vec[pc] = -m[(r, col)];
        }
        let norm = math::sqrt(dot(&vec, &vec));
        for x in &mut vec {
            *x /= norm;
        }
        basis.push(vec);
    }
    basis
}

/// Best fit of `a ~= s * b + t * I` in the Frobenius norm.
#[derive(Debug, Clone, Copy)]
pub struct ScaleShiftFit {
    pub scale: f64,
    pub shift: f64,
    pub residual: f64,
}

pub fn fit_scale_shift(a: &Mat, b: &Mat) -> ScaleShiftFit {
    debug_assert_eq!(a.rows, b.rows);
    debug_assert_eq!(a.cols, b.cols);
    debug_assert_eq!(a.rows, a.cols);
    let n = a.rows as f64;
    let bb = dot(&b.data, &b.data);
    let ba = dot(&b.data, &a.data);
    let trb = b.trace();
    let tra = a.trace();
    // Normal equations for min ||a - s b - t I||^2.
    let det = bb * n - trb * trb;
    let (scale, shift) = if math::abs(det) < 1e-14 * bb.max(1.0) * n {
        (ba / bb, 0.0)
    } else {
        ((ba * n - tra * trb) / det, (bb * tra - trb * ba) / det)
    };
    let mut res_sq = 0.0;
    for i in 0..a.rows {
        for j in 0..a.cols {
            let diag = if i == j { shift } else { 0.0 };
            let d = a[(i, j)] - scale * b[(i, j)] - diag;
            res_sq += d * d;
        }
    }
    ScaleShiftFit {
        scale,
        shift,
        residual: math::sqrt(res_sq),
    }
}
