//! Quadrature conventions and two-mode Gaussian states.
//!
//! Quadratures are `x = (a + a†)/2` and `y = (a - a†)/(2i)`, ordered as
//! `(x₁, y₁, x₂, y₂)`. Under this normalization the vacuum has variance 1/4 in
//! every quadrature and the uncertainty relation reads `V + (i/4)Ω ≥ 0`.

use nalgebra::{Matrix2, Vector4};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{asymmetry, hermitian_eigenvalues4, CMat4, Mat4};

/// Quadrature variance of the vacuum.
pub const VACUUM_VARIANCE: f64 = 0.25;

/// Default absolute tolerance on eigenvalue sign tests.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Single-mode symplectic unit `J = [[0, 1], [-1, 0]]`.
pub fn j2() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

fn block_diag(a: &Matrix2<f64>, b: &Matrix2<f64>) -> Mat4 {
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(b);
    m
}

/// Standard two-mode symplectic form `blockdiag(J, J)`.
pub fn symplectic_form() -> Mat4 {
    block_diag(&j2(), &j2())
}

/// Partially transposed form `blockdiag(J, -J)`; time reversal of mode 2.
pub fn ppt_form() -> Mat4 {
    block_diag(&j2(), &(-j2()))
}

/// `cov + (i/4)·omega`, Hermitian when `cov` is symmetric.
pub fn uncertainty_matrix(cov: &Mat4, omega: &Mat4) -> CMat4 {
    CMat4::from_fn(|r, c| Complex64::new(cov[(r, c)], VACUUM_VARIANCE * omega[(r, c)]))
}

/// Twin-beam squeezing. `xi = tanh(lambda)` is derived on demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwinBeamParams {
    lambda: f64,
}

impl TwinBeamParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::domain(format!(
                "twin-beam parameter lambda must be finite and >= 0, got {lambda}"
            )));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn xi(&self) -> f64 {
        self.lambda.tanh()
    }
}

/// Mean vector and covariance matrix of a two-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeGaussianState {
    pub mean: Vector4<f64>,
    pub cov: Mat4,
}

impl TwoModeGaussianState {
    /// Builds a state, rejecting covariance matrices that are not symmetric to
    /// within `1e-12` relative to their largest entry.
    pub fn new(mean: Vector4<f64>, cov: Mat4) -> Result<Self> {
        let scale = cov.amax().max(1.0);
        let asym = asymmetry(&cov);
        if !cov.iter().all(|x| x.is_finite()) || !mean.iter().all(|x| x.is_finite()) {
            return Err(Error::Structural("non-finite moments".into()));
        }
        if asym > 1e-12 * scale {
            return Err(Error::Structural(format!(
                "covariance matrix is not symmetric (max |V - Vᵀ| = {asym:e})"
            )));
        }
        Ok(Self { mean, cov })
    }

    pub fn vacuum() -> Self {
        Self {
            mean: Vector4::zeros(),
            cov: Mat4::identity() * VACUUM_VARIANCE,
        }
    }

    /// The state with modes 1 and 2 exchanged.
    pub fn mode_swapped(&self) -> Self {
        let perm = [2usize, 3, 0, 1];
        Self {
            mean: Vector4::from_fn(|i, _| self.mean[perm[i]]),
            cov: Mat4::from_fn(|r, c| self.cov[(perm[r], perm[c])]),
        }
    }

    /// Variances along `(x₁±x₂)/√2` and `(y₁±y₂)/√2`, returned in the order
    /// `[x₊, y₊, x₋, y₋]`. For a twin beam in a real-M channel these are the
    /// four Σ² of the closed-form solution.
    pub fn rotated_variances(&self) -> [f64; 4] {
        let v = &self.cov;
        let plus = |i: usize, j: usize| 0.5 * (v[(i, i)] + v[(j, j)] + 2.0 * v[(i, j)]);
        let minus = |i: usize, j: usize| 0.5 * (v[(i, i)] + v[(j, j)] - 2.0 * v[(i, j)]);
        [plus(0, 2), plus(1, 3), minus(0, 2), minus(1, 3)]
    }

    pub(crate) fn ensure_symmetric(&self, tolerance: f64) -> Result<()> {
        let asym = asymmetry(&self.cov);
        if asym > tolerance {
            return Err(Error::Structural(format!(
                "covariance matrix is not symmetric (max |V - Vᵀ| = {asym:e})"
            )));
        }
        Ok(())
    }
}

/// Twin-beam (two-mode squeezed vacuum) with real parameter.
///
/// Both mode blocks are `cosh(2λ)/4 · I` and the cross block is
/// `sinh(2λ)/4 · diag(1, -1)`.
pub fn twb_state(params: TwinBeamParams) -> TwoModeGaussianState {
    let two_l = 2.0 * params.lambda();
    let a = two_l.cosh() * VACUUM_VARIANCE;
    let c = two_l.sinh() * VACUUM_VARIANCE;
    #[rustfmt::skip]
    let cov = Mat4::new(
        a,   0.0, c,   0.0,
        0.0, a,   0.0, -c,
        c,   0.0, a,   0.0,
        0.0, -c,  0.0, a,
    );
    TwoModeGaussianState {
        mean: Vector4::zeros(),
        cov,
    }
}

/// Smallest eigenvalue of `cov + (i/4)·blockdiag(J, J)`.
pub fn uncertainty_margin(state: &TwoModeGaussianState) -> f64 {
    hermitian_eigenvalues4(&uncertainty_matrix(&state.cov, &symplectic_form()))[0]
}

/// Whether the covariance matrix satisfies the uncertainty relation.
pub fn physicality_check(state: &TwoModeGaussianState, tolerance: f64) -> Result<bool> {
    state.ensure_symmetric(tolerance.max(1e-12))?;
    Ok(uncertainty_margin(state) >= -tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn vacuum_is_twb_at_zero() {
        let s = twb_state(TwinBeamParams::new(0.0).unwrap());
        assert_abs_diff_eq!(s.cov, Mat4::identity() * 0.25, epsilon = 1e-15);
        assert_eq!(s, TwoModeGaussianState::vacuum());
    }

    #[test]
    fn twb_lambda_one_entries() {
        let s = twb_state(TwinBeamParams::new(1.0).unwrap());
        assert_abs_diff_eq!(s.cov[(0, 0)], 0.940_548_9, epsilon = 1e-6);
        assert_abs_diff_eq!(s.cov[(0, 2)], 0.906_715_1, epsilon = 1e-6);
        let [xp, yp, xm, ym] = s.rotated_variances();
        assert_abs_diff_eq!(xp, 2f64.exp() / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(yp, (-2f64).exp() / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(xm, (-2f64).exp() / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ym, 2f64.exp() / 4.0, epsilon = 1e-14);
    }

    #[test]
    fn negative_lambda_rejected() {
        assert!(matches!(TwinBeamParams::new(-0.1), Err(Error::Domain(_))));
        assert!(TwinBeamParams::new(f64::NAN).is_err());
    }

    #[test]
    fn physicality_examples() {
        let vac = TwoModeGaussianState::vacuum();
        assert!(physicality_check(&vac, 1e-12).unwrap());
        assert_abs_diff_eq!(uncertainty_margin(&vac), 0.0, epsilon = 1e-15);

        let sub = TwoModeGaussianState {
            mean: Vector4::zeros(),
            cov: Mat4::identity() / 8.0,
        };
        assert!(!physicality_check(&sub, 1e-12).unwrap());

        let twb = twb_state(TwinBeamParams::new(1.0).unwrap());
        assert!(physicality_check(&twb, 1e-12).unwrap());
    }

    #[test]
    fn asymmetric_covariance_is_structural_error() {
        let mut cov = Mat4::identity() * 0.25;
        cov[(0, 1)] = 0.1;
        assert!(matches!(
            TwoModeGaussianState::new(Vector4::zeros(), cov),
            Err(Error::Structural(_))
        ));
        let s = TwoModeGaussianState {
            mean: Vector4::zeros(),
            cov,
        };
        assert!(matches!(
            physicality_check(&s, 1e-10),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn forms() {
        let o = symplectic_form();
        assert_eq!(o.transpose(), -o);
        assert_eq!(o * o, -Mat4::identity());
        let p = ppt_form();
        assert_eq!(p[(2, 3)], -1.0);
        assert_eq!(p[(0, 1)], 1.0);
    }
}
