//! Small dense symmetric solves for the least-squares oracles.
//!
//! Matrices are row-major `p x p` slices. Normal equations are solved by
//! Cholesky with one step of iterative refinement; a system that is not
//! numerically positive definite falls back to the minimum-norm solution
//! from a clipped eigendecomposition.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Relative pivot / eigenvalue threshold below which a direction is treated
/// as null.
pub const CLIP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<f64>,
    /// `true` when the Cholesky factorization failed and the eigen-clipped
    /// minimum-norm solution was returned instead.
    pub used_pseudo_inverse: bool,
}

/// Accumulates `X^T X` and `X^T y` one row at a time.
#[derive(Debug, Clone)]
pub struct NormalEquations {
    p: usize,
    gram: Vec<f64>,
    rhs: Vec<f64>,
    rows: usize,
}

impl NormalEquations {
    pub fn new(p: usize) -> Self {
        Self {
            p,
            gram: vec![0.0; p * p],
            rhs: vec![0.0; p],
            rows: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn add_row(&mut self, row: &[f64], y: f64) {
        debug_assert_eq!(row.len(), self.p);
        let p = self.p;
        for (i, &ri) in row.iter().enumerate() {
            if ri == 0.0 {
                continue;
            }
            self.rhs[i] += ri * y;
            let line = &mut self.gram[i * p..i * p + p];
            for j in i..p {
                line[j] += ri * row[j];
            }
        }
        self.rows += 1;
    }

    pub fn merge(&mut self, other: &NormalEquations) {
        debug_assert_eq!(self.p, other.p);
        self.gram.iter_mut().zip(&other.gram).for_each(|(a, b)| *a += b);
        self.rhs.iter_mut().zip(&other.rhs).for_each(|(a, b)| *a += b);
        self.rows += other.rows;
    }

    /// Full symmetric `X^T X` (the accumulator only fills the upper triangle).
    pub fn gram(&self) -> Vec<f64> {
        let p = self.p;
        let mut full = self.gram.clone();
        for i in 0..p {
            for j in 0..i {
                full[i * p + j] = full[j * p + i];
            }
        }
        full
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Solves `(X^T X + diag(penalty)) theta = X^T y`.
    pub fn solve(&self, penalty: &[f64]) -> Solution {
        let p = self.p;
        let mut a = self.gram();
        for (i, &pen) in penalty.iter().enumerate() {
            a[i * p + i] += pen;
        }
        solve_symmetric(&a, &self.rhs, p)
    }
}

/// Lower-triangular Cholesky factor, or `None` if a pivot falls below
/// `CLIP` times the largest diagonal entry.
pub fn cholesky(a: &[f64], p: usize) -> Option<Vec<f64>> {
    let scale = (0..p).map(|i| a[i * p + i].abs()).fold(0.0, f64::max);
    let tol = CLIP * scale.max(f64::MIN_POSITIVE);
    let mut l = vec![0.0; p * p];
    for j in 0..p {
        let mut diag = a[j * p + j];
        for k in 0..j {
            diag -= l[j * p + k] * l[j * p + k];
        }
        if !(diag > tol) {
            return None;
        }
        let ljj = diag.sqrt();
        l[j * p + j] = ljj;
        for i in j + 1..p {
            let mut s = a[i * p + j];
            for k in 0..j {
                s -= l[i * p + k] * l[j * p + k];
            }
            l[i * p + j] = s / ljj;
        }
    }
    Some(l)
}

fn cholesky_apply(l: &[f64], b: &[f64], p: usize) -> Vec<f64> {
    let mut y = b.to_vec();
    for i in 0..p {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * p + k] * y[k];
        }
        y[i] = s / l[i * p + i];
    }
    for i in (0..p).rev() {
        let mut s = y[i];
        for k in i + 1..p {
            s -= l[k * p + i] * y[k];
        }
        y[i] = s / l[i * p + i];
    }
    y
}

fn mat_vec(a: &[f64], x: &[f64], p: usize) -> Vec<f64> {
    (0..p)
        .map(|i| a[i * p..i * p + p].iter().zip(x).map(|(u, v)| u * v).sum())
        .collect()
}

/// Solves a symmetric positive semi-definite system.
pub fn solve_symmetric(a: &[f64], b: &[f64], p: usize) -> Solution {
    if p == 0 {
        return Solution {
            x: Vec::new(),
            used_pseudo_inverse: false,
        };
    }
    match cholesky(a, p) {
        Some(l) => {
            let mut x = cholesky_apply(&l, b, p);
            let ax = mat_vec(a, &x, p);
            let resid: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            let dx = cholesky_apply(&l, &resid, p);
            x.iter_mut().zip(&dx).for_each(|(xi, di)| *xi += di);
            Solution {
                x,
                used_pseudo_inverse: false,
            }
        }
        None => Solution {
            x: min_norm_solve(a, b, p),
            used_pseudo_inverse: true,
        },
    }
}

/// Minimum-norm solution of `A x = b` for symmetric PSD `A`, dropping
/// eigen-directions with eigenvalue at most `CLIP * max(1, lambda_max)`.
pub fn min_norm_solve(a: &[f64], b: &[f64], p: usize) -> Vec<f64> {
    let m = DMatrix::from_row_slice(p, p, a);
    let eig = SymmetricEigen::new(m);
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cut = CLIP * lmax.max(1.0);
    let rhs = DVector::from_column_slice(b);
    let coords = eig.eigenvectors.transpose() * rhs;
    let mut x = DVector::zeros(p);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > cut {
            x += eig.eigenvectors.column(k) * (coords[k] / lambda);
        }
    }
    x.iter().copied().collect()
}
