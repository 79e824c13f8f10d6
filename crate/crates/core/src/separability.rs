//! PPT separability of two-mode Gaussian states and entanglement survival
//! times of a twin beam in a squeezed-thermal channel.
//!
//! A two-mode Gaussian state is separable iff `S = V + (i/4)·blockdiag(J, -J)`
//! is positive semidefinite. For the twin beam in a real-M channel the
//! condition reduces to two products of rotated variances, and the time at
//! which both reach 1/16 solves a quadratic in `e^{Γt}`.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::Serialize;

use crate::channel::{evolve, DerivedBath};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues4, CMat4};
use crate::states::{
    ppt_form, twb_state, uncertainty_matrix, TwinBeamParams, TwoModeGaussianState,
};

/// Uncertainty-product threshold `(1/4)²`.
pub const SIGMA_PRODUCT_BOUND: f64 = 1.0 / 16.0;

/// Outcome of the PPT test on one covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PptReport {
    /// `S = V + (i/4)Ω` with `Ω = blockdiag(J, -J)`.
    pub s: CMat4,
    /// Eigenvalues of `S`, ascending.
    pub eigenvalues: [f64; 4],
    pub min_eigenvalue: f64,
    /// Coefficients of `q_S(x) = det(S - xI)`, highest degree first.
    pub char_poly: [f64; 5],
    pub separable: bool,
}

impl PptReport {
    /// Roots of `q_S`, computed from the polynomial coefficients alone and
    /// sorted by real part.
    pub fn char_poly_roots(&self) -> [Complex64; 4] {
        poly_roots4(&self.char_poly)
    }

    pub fn eval_char_poly(&self, x: f64) -> f64 {
        self.char_poly.iter().fold(0.0, |acc, c| acc * x + c)
    }

    /// Number of eigenvalues below `-tolerance`.
    pub fn negative_count(&self, tolerance: f64) -> usize {
        self.eigenvalues.iter().filter(|&&e| e < -tolerance).count()
    }
}

fn char_poly_complex(s: &CMat4) -> [Complex64; 5] {
    // Faddeev-LeVerrier: det(xI - S) = x⁴ + c₃x³ + c₂x² + c₁x + c₀.
    let n = 4;
    let id = CMat4::identity();
    let mut coeffs = [Complex64::new(0.0, 0.0); 5];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut mk = CMat4::zeros();
    for k in 1..=n {
        mk = s * mk + id * coeffs[n - k + 1];
        coeffs[n - k] = -(s * mk).trace() / k as f64;
    }
    // Highest degree first. For a 4x4 matrix det(S - xI) = det(xI - S).
    [coeffs[4], coeffs[3], coeffs[2], coeffs[1], coeffs[0]]
}

/// Characteristic polynomial `det(S - xI)` of a Hermitian 4x4 matrix.
pub fn char_poly(s: &CMat4) -> [f64; 5] {
    let c = char_poly_complex(s);
    let scale = c.iter().map(|z| z.norm()).fold(1.0, f64::max);
    debug_assert!(
        c.iter().all(|z| z.im.abs() <= 1e-10 * scale),
        "characteristic polynomial of a Hermitian matrix must be real: {c:?}"
    );
    c.map(|z| z.re)
}

fn eval_complex(coeffs: &[f64; 5], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of a monic quartic via its companion matrix, refined with a few
/// guarded Newton steps.
pub fn poly_roots4(coeffs: &[f64; 5]) -> [Complex64; 4] {
    let lead = coeffs[0];
    let c: Vec<f64> = coeffs.iter().map(|x| x / lead).collect();
    #[rustfmt::skip]
    let companion = Matrix4::new(
        -c[1], -c[2], -c[3], -c[4],
        1.0,   0.0,   0.0,   0.0,
        0.0,   1.0,   0.0,   0.0,
        0.0,   0.0,   1.0,   0.0,
    );
    let ev = companion.complex_eigenvalues();
    let mut roots = [ev[0], ev[1], ev[2], ev[3]];
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let (p, dp) = eval_complex(coeffs, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let next = *r - p / dp;
            if eval_complex(coeffs, next).0.norm() < p.norm() {
                *r = next;
            } else {
                break;
            }
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re));
    roots
}

/// Smallest eigenvalue of the partially transposed uncertainty matrix.
pub fn ppt_margin(state: &TwoModeGaussianState) -> f64 {
    hermitian_eigenvalues4(&uncertainty_matrix(&state.cov, &ppt_form()))[0]
}

/// PPT test; separable iff the smallest eigenvalue of `S` is `>= -tolerance`.
pub fn ppt_test(state: &TwoModeGaussianState, tolerance: f64) -> Result<PptReport> {
    state.ensure_symmetric(1e-12 * state.cov.amax().max(1.0))?;
    let s = uncertainty_matrix(&state.cov, &ppt_form());
    let eigenvalues = hermitian_eigenvalues4(&s);
    let min_eigenvalue = eigenvalues[0];
    Ok(PptReport {
        s,
        eigenvalues,
        min_eigenvalue,
        char_poly: char_poly(&s),
        separable: min_eigenvalue >= -tolerance,
    })
}

/// Uncertainty products of the rotated variances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaVerdict {
    pub separable: bool,
    /// `Σ₁²Σ₄² - 1/16`.
    pub margin_14: f64,
    /// `Σ₂²Σ₃² - 1/16`.
    pub margin_23: f64,
}

impl SigmaVerdict {
    pub fn min_margin(&self) -> f64 {
        self.margin_14.min(self.margin_23)
    }
}

/// Separability of the real-M twin-beam state from its four variances:
/// `Σ₁²Σ₄² >= 1/16` and `Σ₂²Σ₃² >= 1/16`.
pub fn sigma_conditions(sigma: [f64; 4]) -> Result<SigmaVerdict> {
    if let Some(bad) = sigma.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(Error::domain(format!(
            "variances must be positive, got {bad}"
        )));
    }
    let [s1, s2, s3, s4] = sigma;
    let margin_14 = s1 * s4 - SIGMA_PRODUCT_BOUND;
    let margin_23 = s2 * s3 - SIGMA_PRODUCT_BOUND;
    Ok(SigmaVerdict {
        separable: margin_14 >= 0.0 && margin_23 >= 0.0,
        margin_14,
        margin_23,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurvivalMethod {
    ClosedForm,
    Bisection,
}

/// Entanglement survival time of the twin beam, in units of `1/Γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalResult {
    /// Earliest `Γt` after which the state is separable; `+inf` if never.
    pub t_s: f64,
    /// Survival time in the unsqueezed bath with the same `n_th`.
    pub t_0: f64,
    /// `(t_s - t_0)/t_0`.
    pub g: f64,
    pub method: SurvivalMethod,
    /// Set when `λ = 0`: the input is already separable and `t_s = 0`.
    pub initially_separable: bool,
}

impl SurvivalResult {
    fn separable_from_start(method: SurvivalMethod) -> Self {
        Self {
            t_s: 0.0,
            t_0: 0.0,
            g: 0.0,
            method,
            initially_separable: true,
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::domain(format!(
            "twin-beam parameter lambda must be > 0, got {lambda}"
        )));
    }
    Ok(())
}

fn check_photons(n_th: f64, n_s: f64) -> Result<()> {
    if !(n_th.is_finite() && n_th >= 0.0) {
        return Err(Error::domain(format!("n_th must be >= 0, got {n_th}")));
    }
    if !(n_s.is_finite() && n_s >= 0.0) {
        return Err(Error::domain(format!("n_s must be >= 0, got {n_s}")));
    }
    Ok(())
}

/// Survival time in a purely thermal bath:
/// `ln[(1 + 2n_th - e^{-2λ}) / (2 n_th)]`, infinite for pure loss.
pub fn thermal_reference_time(lambda: f64, n_th: f64) -> f64 {
    if n_th == 0.0 {
        return f64::INFINITY;
    }
    ((1.0 + 2.0 * n_th - (-2.0 * lambda).exp()) / (2.0 * n_th)).ln()
}

/// `G = (t_s - t_0)/t_0`, with `G = -1` when only the reference is infinite
/// and `G = 0` when both are.
pub fn relative_change(t_s: f64, t_0: f64) -> f64 {
    match (t_s.is_infinite(), t_0.is_infinite()) {
        (true, true) => 0.0,
        (false, true) => -1.0,
        _ => (t_s - t_0) / t_0,
    }
}

/// `e^{Γ t_s}` for the in-phase (real, non-negative `M`) squeezed bath.
///
/// With `c = 1 + 2n_th`, `p = 1 + 2n_s` and `α = e^{-2λ}`, the binding
/// condition `16 Σ₂²Σ₃² = 1` becomes `A u² + B u + C = 0` in `u = e^{Γt}`:
///
/// ```text
/// A = c² - 1 = 4 n_th (1 + n_th)
/// B = 2c(αp - c)
/// C = (c - αp)² - 4α² n_s (1 + n_s)
/// ```
///
/// and `t_s` is the log of the larger root, `u = f + √(f² - C/A)` with
/// `f = c(c - αp)/(4 n_th(1 + n_th))`. At `n_th = 0` the quadratic
/// degenerates and the root is finite only when `αp > 1`.
fn separation_factor(lambda: f64, n_th: f64, n_s: f64) -> f64 {
    let c = 1.0 + 2.0 * n_th;
    let p = 1.0 + 2.0 * n_s;
    let alpha = (-2.0 * lambda).exp();
    let a = 4.0 * n_th * (1.0 + n_th);
    let b = 2.0 * c * (alpha * p - c);
    let c0 = (c - alpha * p).powi(2) - 4.0 * alpha * alpha * n_s * (1.0 + n_s);
    let disc = (b * b - 4.0 * a * c0).max(0.0);
    if b > 0.0 {
        // Stable form of the larger root; also covers A = 0.
        -2.0 * c0 / (b + disc.sqrt())
    } else if a > 0.0 {
        (-b + disc.sqrt()) / (2.0 * a)
    } else {
        f64::INFINITY
    }
}

/// Closed-form survival time for the in-phase bath (`θ = 0`).
pub fn survival_time_closed(lambda: f64, n_th: f64, n_s: f64) -> Result<SurvivalResult> {
    check_lambda(lambda)?;
    check_photons(n_th, n_s)?;
    if lambda == 0.0 {
        return Ok(SurvivalResult::separable_from_start(
            SurvivalMethod::ClosedForm,
        ));
    }
    let t_0 = thermal_reference_time(lambda, n_th);
    let t_s = if n_s == 0.0 {
        t_0
    } else {
        separation_factor(lambda, n_th, n_s).ln()
    };
    Ok(SurvivalResult {
        t_s,
        t_0,
        g: relative_change(t_s, t_0),
        method: SurvivalMethod::ClosedForm,
        initially_separable: false,
    })
}

/// Bracketing and bisection settings for [`survival_time_numeric_with`].
/// All times are in units of `1/Γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionOptions {
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub t_max: f64,
    /// Relative width at which bisection stops.
    pub rel_tol: f64,
    /// The upper bracket end must clear zero by this much, so that margins
    /// drifting towards zero from below are not mistaken for a crossing.
    pub bracket_guard: f64,
}

impl Default for BisectionOptions {
    fn default() -> Self {
        Self {
            bracket_lo: 1e-6,
            bracket_hi: 1.0,
            t_max: 100.0,
            rel_tol: 1e-14,
            bracket_guard: 1e-12,
        }
    }
}

/// Smallest eigenvalue of `S` for the twin beam after `Γt = gt`.
pub fn twb_ppt_margin(lambda: f64, bath: &DerivedBath, gt: f64) -> Result<f64> {
    let s0 = twb_state(TwinBeamParams::new(lambda)?);
    let s = evolve(&s0, bath, gt / bath.damping())?;
    Ok(ppt_margin(&s))
}

/// Survival time for any bath phase, by bisection on the smallest eigenvalue
/// of `S(t)`.
pub fn survival_time_numeric(lambda: f64, bath: &DerivedBath) -> Result<SurvivalResult> {
    survival_time_numeric_with(lambda, bath, BisectionOptions::default())
}

pub fn survival_time_numeric_with(
    lambda: f64,
    bath: &DerivedBath,
    opts: BisectionOptions,
) -> Result<SurvivalResult> {
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(SurvivalResult::separable_from_start(
            SurvivalMethod::Bisection,
        ));
    }
    let margin = |gt: f64| twb_ppt_margin(lambda, bath, gt);

    if margin(0.0)? >= 0.0 {
        return Err(Error::Numerical(
            "twin beam is not entangled at t = 0; cannot bracket a crossing".into(),
        ));
    }
    let mut lo = if margin(opts.bracket_lo)? < 0.0 {
        opts.bracket_lo
    } else {
        0.0
    };
    let mut hi = opts.bracket_hi.max(lo);
    let t_0 = thermal_reference_time(lambda, bath.spec.n_th);
    loop {
        let m = margin(hi)?;
        if m > opts.bracket_guard {
            break;
        }
        if m < 0.0 {
            lo = hi;
        }
        if hi >= opts.t_max {
            log::info!(
                "no separability crossing for lambda={lambda} up to gamma*t={}; t_s = inf",
                opts.t_max
            );
            return Ok(SurvivalResult {
                t_s: f64::INFINITY,
                t_0,
                g: relative_change(f64::INFINITY, t_0),
                method: SurvivalMethod::Bisection,
                initially_separable: false,
            });
        }
        hi = (2.0 * hi).min(opts.t_max);
    }

    for _ in 0..400 {
        if hi - lo <= opts.rel_tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if margin(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let t_s = 0.5 * (lo + hi);
    Ok(SurvivalResult {
        t_s,
        t_0,
        g: relative_change(t_s, t_0),
        method: SurvivalMethod::Bisection,
        initially_separable: false,
    })
}

/// PPT report of the twin beam at the time where `e^{-Γt} = exp_gamma_t`.
pub fn char_poly_profile(lambda: f64, bath: &DerivedBath, exp_gamma_t: f64) -> Result<PptReport> {
    if !(exp_gamma_t > 0.0 && exp_gamma_t <= 1.0) {
        return Err(Error::domain(format!(
            "exp(-gamma t) must lie in (0, 1], got {exp_gamma_t}"
        )));
    }
    let s0 = twb_state(TwinBeamParams::new(lambda)?);
    let t = -exp_gamma_t.ln() / bath.damping();
    ppt_test(&evolve(&s0, bath, t)?, crate::states::DEFAULT_TOLERANCE)
}
