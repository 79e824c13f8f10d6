//! Squeezed-thermal bath and the moment-form solution of the two-mode master
//! equation.
//!
//! Each mode is damped at rate Γ into its own reservoir with effective photon
//! number `N` and squeezing `M`; both reservoirs share the same `(N, M)`. The
//! drift is linear and the diffusion constant, so the covariance relaxes
//! exponentially towards the stationary state:
//!
//! ```text
//! mean(t) = e^{-Γt/2} mean(0)
//! cov(t)  = e^{-Γt} cov(0) + (1 - e^{-Γt}) cov_∞
//! ```
//!
//! This holds for complex `M`; for real `M` the twin-beam covariance reduces to
//! the four variances returned by [`sigma_squared`].
//!
//! Only intra-mode (local) squeezing is modelled. A two-mode squeezed
//! reservoir with cross-mode `M` would add off-diagonal diffusion blocks and is
//! not covered here.

use std::f64::consts::TAU;

use nalgebra::{Matrix2, Vector4};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Mat4;
use crate::states::{TwoModeGaussianState, VACUUM_VARIANCE};

/// Physical reservoir parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BathSpec {
    /// Thermal photon number.
    pub n_th: f64,
    /// Squeezing photon number, `sinh²|ζ|`.
    pub n_s: f64,
    /// Squeezing phase in radians, normalized to `[0, 2π)`.
    pub theta: f64,
    /// Damping rate Γ (inverse time).
    pub damping: f64,
}

impl BathSpec {
    pub fn new(n_th: f64, n_s: f64, theta: f64, damping: f64) -> Result<Self> {
        if !(n_th.is_finite() && n_s.is_finite() && theta.is_finite() && damping.is_finite()) {
            return Err(Error::domain("bath parameters must be finite"));
        }
        if n_th < 0.0 {
            return Err(Error::domain(format!("n_th must be >= 0, got {n_th}")));
        }
        if n_s < 0.0 {
            return Err(Error::domain(format!("n_s must be >= 0, got {n_s}")));
        }
        if damping <= 0.0 {
            return Err(Error::domain(format!(
                "damping rate must be > 0, got {damping}"
            )));
        }
        Ok(Self {
            n_th,
            n_s,
            theta: theta.rem_euclid(TAU),
            damping,
        })
    }

    /// Unit damping rate; times are then measured in units of 1/Γ.
    pub fn unit_rate(n_th: f64, n_s: f64, theta: f64) -> Result<Self> {
        Self::new(n_th, n_s, theta, 1.0)
    }
}

/// Channel parameters entering the master equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedBath {
    pub spec: BathSpec,
    /// Effective photon number `N`.
    pub n_eff: f64,
    /// Squeezing parameter `M = |M| e^{iθ}`.
    pub m: Complex64,
    /// `γ = 1/(2N + 1)`. The Fokker-Planck equation is written in the rescaled
    /// time `τ = Γt/γ`; nothing in the public API uses τ.
    pub gamma: f64,
}

impl DerivedBath {
    pub fn damping(&self) -> f64 {
        self.spec.damping
    }

    pub fn is_phase_sensitive(&self) -> bool {
        self.m.norm() > 0.0
    }

    pub fn diffusion(&self) -> DiffusionMatrix {
        diffusion_matrix(self.n_eff, self.m)
    }
}

/// `N = n_th + n_s(1 + 2 n_th)`, `|M| = (1 + 2 n_th) √(n_s(1 + n_s))`,
/// `arg M = θ`.
pub fn derive_bath(spec: BathSpec) -> Result<DerivedBath> {
    let spec = BathSpec::new(spec.n_th, spec.n_s, spec.theta, spec.damping)?;
    let thermal = 1.0 + 2.0 * spec.n_th;
    let n_eff = spec.n_th + spec.n_s * thermal;
    let m_abs = thermal * (spec.n_s * (1.0 + spec.n_s)).sqrt();
    let m = Complex64::from_polar(m_abs, spec.theta);
    let bound = n_eff * (n_eff + 1.0);
    if m_abs * m_abs > bound + 1e-12 * bound.max(1.0) {
        return Err(Error::Numerical(format!(
            "|M|^2 = {} exceeds N(N+1) = {bound}",
            m_abs * m_abs
        )));
    }
    Ok(DerivedBath {
        spec,
        n_eff,
        m,
        gamma: 1.0 / (2.0 * n_eff + 1.0),
    })
}

/// Fokker-Planck diffusion matrix in τ units; block diagonal over the modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionMatrix(pub Mat4);

impl DiffusionMatrix {
    pub fn mode_block(&self) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.mode_block().symmetric_eigenvalues().min()
    }
}

/// Builds the diffusion matrix for arbitrary `(N, M)`, not necessarily
/// arising from a physical squeezed-thermal reservoir.
pub fn diffusion_matrix(n_eff: f64, m: Complex64) -> DiffusionMatrix {
    let gamma = 1.0 / (2.0 * n_eff + 1.0);
    let block = Matrix2::new(
        0.5 + gamma * m.re,
        gamma * m.im,
        gamma * m.im,
        0.5 - gamma * m.re,
    ) * 0.5;
    let mut d = Mat4::zeros();
    d.fixed_view_mut::<2, 2>(0, 0).copy_from(&block);
    d.fixed_view_mut::<2, 2>(2, 2).copy_from(&block);
    DiffusionMatrix(d)
}

fn stationary_block(bath: &DerivedBath) -> Matrix2<f64> {
    let diag = (2.0 * bath.n_eff + 1.0) * VACUUM_VARIANCE;
    Matrix2::new(
        diag + 0.5 * bath.m.re,
        0.5 * bath.m.im,
        0.5 * bath.m.im,
        diag - 0.5 * bath.m.re,
    )
}

/// Fixed point of the channel: a product of two identical squeezed-thermal
/// single-mode states, equal to `D/γ`.
pub fn stationary_covariance(bath: &DerivedBath) -> TwoModeGaussianState {
    let block = stationary_block(bath);
    let mut cov = Mat4::zeros();
    cov.fixed_view_mut::<2, 2>(0, 0).copy_from(&block);
    cov.fixed_view_mut::<2, 2>(2, 2).copy_from(&block);
    TwoModeGaussianState {
        mean: Vector4::zeros(),
        cov,
    }
}

/// Propagates a Gaussian state for physical time `t`.
pub fn evolve(
    state: &TwoModeGaussianState,
    bath: &DerivedBath,
    t: f64,
) -> Result<TwoModeGaussianState> {
    if !t.is_finite() || t < 0.0 {
        if t == f64::INFINITY {
            return Ok(stationary_covariance(bath));
        }
        return Err(Error::domain(format!(
            "evolution time must be >= 0, got {t}"
        )));
    }
    let decay = (-bath.damping() * t).exp();
    let inf = stationary_covariance(bath).cov;
    let cov = state.cov * decay + inf * (1.0 - decay);
    Ok(TwoModeGaussianState {
        mean: state.mean * decay.sqrt(),
        cov,
    })
}

/// The four twin-beam variances `(Σ₁², Σ₂², Σ₃², Σ₄²)` for real `M`.
///
/// `Σ₁²` and `Σ₄²` start from `σ₊² = e^{2λ}/4`, `Σ₂²` and `Σ₃²` from
/// `σ₋² = e^{-2λ}/4`; `Σ₁², Σ₃²` relax towards `(1 + 2N + 2M)/4` and
/// `Σ₂², Σ₄²` towards `(1 + 2N - 2M)/4`.
pub fn sigma_squared(lambda: f64, bath: &DerivedBath, t: f64) -> Result<[f64; 4]> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::domain(format!("lambda must be >= 0, got {lambda}")));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain(format!(
            "evolution time must be >= 0, got {t}"
        )));
    }
    if bath.m.im.abs() > 1e-12 * bath.m.norm().max(1.0) {
        return Err(Error::Unsupported(
            "closed-form variances need real M (theta = 0 or pi); use evolve() instead".into(),
        ));
    }
    let decay = (-bath.damping() * t).exp();
    let sigma_plus = (2.0 * lambda).exp() * VACUUM_VARIANCE;
    let sigma_minus = (-2.0 * lambda).exp() * VACUUM_VARIANCE;
    let base = 1.0 + 2.0 * bath.n_eff;
    let d_plus = (base + 2.0 * bath.m.re) * VACUUM_VARIANCE * (1.0 - decay);
    let d_minus = (base - 2.0 * bath.m.re) * VACUUM_VARIANCE * (1.0 - decay);
    Ok([
        sigma_plus * decay + d_plus,
        sigma_minus * decay + d_minus,
        sigma_minus * decay + d_plus,
        sigma_plus * decay + d_minus,
    ])
}
