//! Small dense helpers shared by the Gaussian and Fock sides.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

pub type Mat4 = Matrix4<f64>;
pub type CMat4 = Matrix4<Complex64>;

/// Eigenvalues of a Hermitian 4x4 matrix, sorted ascending.
pub fn hermitian_eigenvalues4(m: &CMat4) -> [f64; 4] {
    let ev = m.symmetric_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(f64::total_cmp);
    out
}

/// Smallest eigenvalue of a dense Hermitian matrix of any size.
pub fn hermitian_min_eigenvalue(m: DMatrix<Complex64>) -> f64 {
    m.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Largest absolute entry of `m - m^T`.
pub fn asymmetry(m: &Mat4) -> f64 {
    (m - m.transpose()).amax()
}

pub fn to_complex(m: &Mat4) -> CMat4 {
    m.map(|x| Complex64::new(x, 0.0))
}
