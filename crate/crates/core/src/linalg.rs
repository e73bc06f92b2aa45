//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Slack applied to every norm-ball and unitarity check on decomposition inputs and outputs.
pub const NORM_SLACK: f64 = 1e-9;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn from_real(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn diag(entries: &[f64]) -> CMatrix {
    let n = entries.len();
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(entries[i], 0.0)
        } else {
            ZERO
        }
    })
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Spectral (operator) norm.
pub fn op_norm(m: &CMatrix) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Trace norm `tr|m|`, the sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    singular_values(m).into_iter().sum()
}

pub fn real_op_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// `‖U*U − I‖` in operator norm.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    op_norm(&(u.adjoint() * u - identity(n)))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn frobenius_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn ensure_square(m: &CMatrix, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Shape {
            expected: n,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

/// `sqrt(I - h^2)` for a Hermitian contraction `h`.
///
/// Eigenvalues are clamped to `[-1, 1]` before forming `1 - λ²`, so rounding that pushes a
/// unit eigenvalue to `1 + 1e-16` yields a zero root rather than a NaN.
pub fn sqrt_one_minus_square(h: &CMatrix) -> CMatrix {
    let n = h.nrows();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    // Symmetrize so the eigensolver sees an exactly Hermitian input.
    let herm = (h + h.adjoint()).scale(0.5);
    let eig = herm.symmetric_eigen();
    let roots: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| {
            let l = l.clamp(-1.0, 1.0);
            (1.0 - l * l).max(0.0).sqrt()
        })
        .collect();
    let v = &eig.eigenvectors;
    v * diag(&roots) * v.adjoint()
}
