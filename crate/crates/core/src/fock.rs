//! Brute-force reference: the two-mode master equation on a truncated Fock
//! space.
//!
//! The density operator is stored densely with composite index `(n₁, n₂)` on
//! rows and `(m₁, m₂)` on columns, mode 1 major. The generator is the exact
//! one projected onto `n < d` in each mode, so the trace only changes through
//! probability pushed past the cutoff. That loss is reported as leakage and is
//! never renormalized away.
//!
//! Per mode the generator is
//!
//! ```text
//! Γ(1+N) L[a] + Γ N L[a†] − Γ M 𝓜[a†] − Γ M* 𝓜[a]
//! ```
//!
//! with `L[O]ρ = OρO† − ½{O†O, ρ}` and `𝓜[O]ρ = OρO − ½{OO, ρ}`. The sign of
//! the squeezing terms makes `⟨a²⟩ → M` in the steady state, matching the
//! stationary covariance used by [`crate::channel`].

use nalgebra::{DMatrix, Vector4};
use num_complex::Complex64;

use crate::channel::DerivedBath;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_min_eigenvalue, Mat4};
use crate::states::{TwoModeGaussianState, VACUUM_VARIANCE};

/// Eigenvalues of the partial transpose above this are treated as
/// non-negative; truncation leaves small negative residues of this order.
pub const PPT_EIGENVALUE_FLOOR: f64 = 1e-8;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Dense two-mode density operator at per-mode cutoff `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    d: usize,
    data: Vec<Complex64>,
}

impl TruncatedState {
    pub fn zeros(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::domain(format!("Fock cutoff must be >= 2, got {d}")));
        }
        Ok(Self {
            d,
            data: vec![ZERO; d * d * d * d],
        })
    }

    /// `|n₁, n₂⟩⟨n₁, n₂|`.
    pub fn number_state(d: usize, n1: usize, n2: usize) -> Result<Self> {
        if n1 >= d || n2 >= d {
            return Err(Error::domain("number state outside the truncated space"));
        }
        let mut s = Self::zeros(d)?;
        s.set(n1, n2, n1, n2, Complex64::new(1.0, 0.0));
        Ok(s)
    }

    pub fn vacuum(d: usize) -> Result<Self> {
        Self::number_state(d, 0, 0)
    }

    /// Product of two thermal states with mean photon number `n_th`, cut at
    /// `d` without renormalization.
    pub fn thermal_product(n_th: f64, d: usize) -> Result<Self> {
        if !(n_th.is_finite() && n_th >= 0.0) {
            return Err(Error::domain(format!("n_th must be >= 0, got {n_th}")));
        }
        let ratio = n_th / (1.0 + n_th);
        let p: Vec<f64> = (0..d)
            .map(|n| ratio.powi(n as i32) / (1.0 + n_th))
            .collect();
        let mut s = Self::zeros(d)?;
        for n1 in 0..d {
            for n2 in 0..d {
                s.set(n1, n2, n1, n2, Complex64::new(p[n1] * p[n2], 0.0));
            }
        }
        Ok(s)
    }

    /// Builds a state from a row-major `d² x d²` buffer.
    pub fn from_raw(d: usize, data: Vec<Complex64>) -> Result<Self> {
        if d < 2 || data.len() != d * d * d * d {
            return Err(Error::Structural(format!(
                "buffer of length {} does not match cutoff {d}",
                data.len()
            )));
        }
        Ok(Self { d, data })
    }

    pub fn cutoff(&self) -> usize {
        self.d
    }

    /// Hilbert-space dimension `d²`.
    pub fn dim(&self) -> usize {
        self.d * self.d
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    fn idx(&self, n1: usize, n2: usize, m1: usize, m2: usize) -> usize {
        let d = self.d;
        ((n1 * d + n2) * d + m1) * d + m2
    }

    #[inline]
    pub fn get(&self, n1: usize, n2: usize, m1: usize, m2: usize) -> Complex64 {
        self.data[self.idx(n1, n2, m1, m2)]
    }

    #[inline]
    pub fn set(&mut self, n1: usize, n2: usize, m1: usize, m2: usize, v: Complex64) {
        let i = self.idx(n1, n2, m1, m2);
        self.data[i] = v;
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i]).sum()
    }

    /// `max |ρ - ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                let e = (self.data[r * dim + c] - self.data[c * dim + r].conj()).norm();
                worst = worst.max(e);
            }
        }
        worst
    }

    /// Replaces `ρ` by `(ρ + ρ†)/2` and returns the largest entry changed.
    pub fn hermitize(&mut self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                let a = self.data[r * dim + c];
                let b = self.data[c * dim + r];
                let avg = 0.5 * (a + b.conj());
                worst = worst.max((a - avg).norm());
                self.data[r * dim + c] = avg;
                self.data[c * dim + r] = avg.conj();
            }
        }
        worst
    }

    /// Probability of finding either mode in its top Fock level.
    pub fn edge_population(&self) -> f64 {
        let d = self.d;
        let mut p = 0.0;
        for n1 in 0..d {
            for n2 in 0..d {
                if n1 == d - 1 || n2 == d - 1 {
                    p += self.get(n1, n2, n1, n2).re;
                }
            }
        }
        p
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        DMatrix::from_fn(dim, dim, |r, c| self.data[r * dim + c])
    }

    /// Partial transpose on mode 2: `(n₂, m₂) → (m₂, n₂)`.
    pub fn partial_transpose(&self) -> Self {
        let d = self.d;
        let mut out = self.clone();
        for n1 in 0..d {
            for n2 in 0..d {
                for m1 in 0..d {
                    for m2 in 0..d {
                        out.set(n1, n2, m1, m2, self.get(n1, m2, m1, n2));
                    }
                }
            }
        }
        out
    }

    fn axpy(&mut self, alpha: f64, x: &Self) {
        for (y, x) in self.data.iter_mut().zip(&x.data) {
            *y += x * alpha;
        }
    }
}

/// Cutoff and step settings for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Per-mode Fock cutoff.
    pub d: usize,
    /// RK4 step in units of `1/Γ`.
    pub dt: f64,
    /// Final time in units of `1/Γ`.
    pub t_final: f64,
    /// Largest acceptable trace loss.
    pub trunc_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            d: 25,
            dt: 0.01,
            t_final: 0.0,
            trunc_tol: 1e-6,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::domain(format!(
                "Fock cutoff must be >= 2, got {}",
                self.d
            )));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::domain(format!("step must be > 0, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::domain(format!(
                "final time must be >= 0, got {}",
                self.t_final
            )));
        }
        if self.trunc_tol.is_nan() || self.trunc_tol <= 0.0 {
            return Err(Error::domain("truncation tolerance must be > 0"));
        }
        Ok(())
    }
}

/// Smallest cutoff at which the truncated twin beam loses at most `tol` norm.
pub fn min_twb_cutoff(lambda: f64, tol: f64) -> usize {
    let xi = lambda.tanh();
    if xi == 0.0 {
        return 1;
    }
    // deficit = ξ^{2d}
    (tol.ln() / (2.0 * xi.ln())).ceil().max(1.0) as usize
}

/// Truncated, renormalized twin beam `√(1-ξ²) Σ ξᵖ |p, p⟩`.
///
/// Returns the state together with the norm deficit `ξ^{2d}` removed by the
/// renormalization.
pub fn twb_density(lambda: f64, d: usize, trunc_tol: f64) -> Result<(TruncatedState, f64)> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::domain(format!("lambda must be >= 0, got {lambda}")));
    }
    let xi = lambda.tanh();
    let deficit = xi.powi(2 * d as i32);
    if deficit > trunc_tol {
        return Err(Error::Truncation {
            message: format!(
                "twin beam with lambda={lambda} loses {deficit:e} norm at cutoff {d}, above {trunc_tol:e}"
            ),
            min_cutoff: Some(min_twb_cutoff(lambda, trunc_tol)),
        });
    }
    let norm = 1.0 - deficit;
    let amp: Vec<f64> = (0..d).map(|p| xi.powi(p as i32)).collect();
    let scale = (1.0 - xi * xi) / norm;
    let mut s = TruncatedState::zeros(d)?;
    for p in 0..d {
        for q in 0..d {
            s.set(p, p, q, q, Complex64::new(scale * amp[p] * amp[q], 0.0));
        }
    }
    Ok((s, deficit))
}

struct Rates {
    down: f64,
    up: f64,
    kappa: Complex64,
}

impl Rates {
    fn new(bath: &DerivedBath) -> Self {
        let g = bath.damping();
        Self {
            down: g * (1.0 + bath.n_eff),
            up: g * bath.n_eff,
            kappa: -bath.m * g,
        }
    }
}

/// Coefficient tables of the single-mode generator. Each off-diagonal term
/// maps `ρ[n + dn, m + dm]` into `out[n, m]` with weight `table[n·d + m]`.
struct ModeTerms {
    diag: Vec<f64>,
    shifted: Vec<(isize, isize, Vec<Complex64>)>,
}

impl ModeTerms {
    fn new(bath: &DerivedBath, d: usize) -> Self {
        let rates = Rates::new(bath);
        let (gd, gu, k, kc) = (rates.down, rates.up, rates.kappa, rates.kappa.conj());
        let sq = |x: usize| (x as f64).sqrt();
        let table = |f: &dyn Fn(usize, usize) -> Complex64| -> Vec<Complex64> {
            (0..d * d).map(|i| f(i / d, i % d)).collect()
        };
        let real = |x: f64| Complex64::new(x, 0.0);
        let diag = (0..d * d)
            .map(|i| {
                let (n, m) = (i / d, i % d);
                -0.5 * (gd * (n + m) as f64 + gu * (n + m + 2) as f64)
            })
            .collect();
        let shifted = vec![
            // Γ(1+N) a ρ a†
            (1, 1, table(&|n, m| real(gd * sq(n + 1) * sq(m + 1)))),
            // Γ N a† ρ a
            (-1, -1, table(&|n, m| real(gu * sq(n) * sq(m)))),
            // κ 𝓜[a†]: a†ρa† − ½ a†a†ρ − ½ ρa†a†
            (-1, 1, table(&|n, m| k * (sq(n) * sq(m + 1)))),
            (
                -2,
                0,
                table(&|n, _| k * (-0.5 * sq(n) * sq(n.saturating_sub(1)))),
            ),
            (0, 2, table(&|_, m| k * (-0.5 * sq(m + 1) * sq(m + 2)))),
            // κ* 𝓜[a]: aρa − ½ aaρ − ½ ρaa
            (1, -1, table(&|n, m| kc * (sq(n + 1) * sq(m)))),
            (2, 0, table(&|n, _| kc * (-0.5 * sq(n + 1) * sq(n + 2)))),
            (
                0,
                -2,
                table(&|_, m| kc * (-0.5 * sq(m) * sq(m.saturating_sub(1)))),
            ),
        ];
        Self { diag, shifted }
    }
}

#[inline]
fn shift(i: usize, by: isize, d: usize) -> Option<usize> {
    let j = i as isize + by;
    (j >= 0 && (j as usize) < d).then_some(j as usize)
}

/// Writes `dρ/dt` into `out`.
pub fn lindblad_rhs_into(
    rho: &TruncatedState,
    bath: &DerivedBath,
    out: &mut TruncatedState,
) -> Result<()> {
    if rho.d != out.d {
        return Err(Error::Structural(format!(
            "cutoff mismatch: state {} vs output {}",
            rho.d, out.d
        )));
    }
    let d = rho.d;
    let terms = ModeTerms::new(bath, d);
    let r = &rho.data;
    let row_start = |n1: usize, n2: usize, m1: usize| ((n1 * d + n2) * d + m1) * d;

    // Rows are contiguous in m₂; mode 1 terms move whole rows, mode 2 terms
    // move within and between rows. Only n₁ <= m₁ is computed; the rest
    // follows from Hermiticity of the generator's output.
    for n1 in 0..d {
        for n2 in 0..d {
            for m1 in n1..d {
                let base = row_start(n1, n2, m1);
                let src = &r[base..base + d];
                let dst = &mut out.data[base..base + d];
                let diag_a = terms.diag[n1 * d + m1];
                let diag_b = &terms.diag[n2 * d..n2 * d + d];
                for ((o, x), db) in dst.iter_mut().zip(src).zip(diag_b) {
                    *o = x * (diag_a + db);
                }

                for (dn, dm, table) in &terms.shifted {
                    let (Some(sn), Some(sm)) = (shift(n1, *dn, d), shift(m1, *dm, d)) else {
                        continue;
                    };
                    let c = table[n1 * d + m1];
                    let sb = row_start(sn, n2, sm);
                    for (o, x) in dst.iter_mut().zip(&r[sb..sb + d]) {
                        *o += x * c;
                    }
                }

                for (dn, dm, table) in &terms.shifted {
                    let Some(sn) = shift(n2, *dn, d) else {
                        continue;
                    };
                    let sb = row_start(n1, sn, m1);
                    let src_row = &r[sb..sb + d];
                    let coef = &table[n2 * d..n2 * d + d];
                    let lo = (-*dm).max(0) as usize;
                    let hi = (d as isize - (*dm).max(0)) as usize;
                    for m2 in lo..hi {
                        dst[m2] += src_row[(m2 as isize + dm) as usize] * coef[m2];
                    }
                }
            }
        }
    }
    for n1 in 1..d {
        for m1 in 0..n1 {
            for n2 in 0..d {
                for m2 in 0..d {
                    let v = out.data[row_start(m1, m2, n1) + n2].conj();
                    out.data[row_start(n1, n2, m1) + m2] = v;
                }
            }
        }
    }
    Ok(())
}

/// Right-hand side of the truncated master equation, `dρ/dt`.
pub fn lindblad_rhs(rho: &TruncatedState, bath: &DerivedBath) -> TruncatedState {
    let mut out = TruncatedState {
        d: rho.d,
        data: vec![ZERO; rho.data.len()],
    };
    lindblad_rhs_into(rho, bath, &mut out).expect("output buffer matches input cutoff");
    out
}

/// Result of [`integrate`].
#[derive(Debug, Clone)]
pub struct Integration {
    pub state: TruncatedState,
    /// `1 - Tr ρ(t)` relative to the initial trace.
    pub leakage: f64,
    /// Largest entry changed by the per-step Hermitian symmetrization.
    pub hermiticity_correction: f64,
    pub steps: usize,
}

/// Gershgorin bound on the spectral radius of the truncated generator.
///
/// Boundary levels make the truncated generator much stiffer than the
/// physical dynamics; the bound grows linearly with `d`.
pub fn generator_bound(bath: &DerivedBath, d: usize) -> f64 {
    let rates = Rates::new(bath);
    let k = rates.kappa.norm();
    let sq = |x: usize| (x as f64).sqrt();
    let mut worst = 0.0f64;
    for n in 0..d {
        for m in 0..d {
            let diag = 0.5 * (rates.down * (n + m) as f64 + rates.up * (n + m + 2) as f64);
            let off = rates.down * sq(n + 1) * sq(m + 1)
                + rates.up * sq(n) * sq(m)
                + k * (sq(n) * sq(m + 1)
                    + sq(n + 1) * sq(m)
                    + 0.5
                        * (sq(n) * sq(n.saturating_sub(1))
                            + sq(m + 1) * sq(m + 2)
                            + sq(n + 1) * sq(n + 2)
                            + sq(m) * sq(m.saturating_sub(1))));
            worst = worst.max(diag + off);
        }
    }
    // Both modes see the same bath.
    2.0 * worst
}

/// Largest `|h λ|` used for RK4, inside its real-axis stability limit 2.785.
const RK4_STABILITY: f64 = 2.5;

/// Fixed-step RK4 integration of the master equation to `config.t_final`.
///
/// The step is `config.dt`, reduced if needed so that `h · generator_bound`
/// stays inside the RK4 stability region; the step count actually used is
/// reported.
pub fn integrate(
    state: &TruncatedState,
    bath: &DerivedBath,
    config: &OracleConfig,
) -> Result<Integration> {
    config.validate()?;
    if state.d != config.d {
        return Err(Error::Structural(format!(
            "state cutoff {} does not match config cutoff {}",
            state.d, config.d
        )));
    }
    let stable_dt = RK4_STABILITY * bath.damping() / generator_bound(bath, config.d);
    let dt = config.dt.min(stable_dt);
    if dt < config.dt {
        log::debug!(
            "step reduced from {} to {dt} for stability at d={}",
            config.dt,
            config.d
        );
    }
    let steps = (config.t_final / dt).ceil() as usize;
    let trace0 = state.trace().re;
    let mut rho = state.clone();
    let mut correction = 0.0f64;
    if steps > 0 {
        let h = config.t_final / steps as f64 / bath.damping();
        let mut k1 = rho.clone();
        let mut k2 = rho.clone();
        let mut k3 = rho.clone();
        let mut k4 = rho.clone();
        let mut tmp = rho.clone();
        for step in 0..steps {
            lindblad_rhs_into(&rho, bath, &mut k1)?;
            tmp.data.copy_from_slice(&rho.data);
            tmp.axpy(0.5 * h, &k1);
            lindblad_rhs_into(&tmp, bath, &mut k2)?;
            tmp.data.copy_from_slice(&rho.data);
            tmp.axpy(0.5 * h, &k2);
            lindblad_rhs_into(&tmp, bath, &mut k3)?;
            tmp.data.copy_from_slice(&rho.data);
            tmp.axpy(h, &k3);
            lindblad_rhs_into(&tmp, bath, &mut k4)?;
            for i in 0..rho.data.len() {
                rho.data[i] +=
                    (k1.data[i] + (k2.data[i] + k3.data[i]) * 2.0 + k4.data[i]) * (h / 6.0);
            }
            correction = correction.max(rho.hermitize());
            let leak = trace0 - rho.trace().re;
            if leak > config.trunc_tol {
                return Err(Error::Truncation {
                    message: format!(
                        "trace leakage {leak:e} exceeds {:e} after {} of {steps} steps; increase the cutoff",
                        config.trunc_tol,
                        step + 1
                    ),
                    min_cutoff: None,
                });
            }
            if !leak.is_finite() || leak < -1e-10 {
                return Err(Error::Numerical(format!(
                    "trace grew by {:e} after {} steps; integration is unstable",
                    -leak,
                    step + 1
                )));
            }
        }
    }
    log::debug!(
        "integrated {steps} steps at d={}, max hermiticity correction {correction:e}",
        config.d
    );
    let leakage = trace0 - rho.trace().re;
    Ok(Integration {
        state: rho,
        leakage,
        hermiticity_correction: correction,
        steps,
    })
}

/// Normally ordered moments needed for the covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderMoments {
    pub a: Complex64,
    pub b: Complex64,
    pub aa: Complex64,
    pub bb: Complex64,
    pub na: f64,
    pub nb: f64,
    pub ab: Complex64,
    /// `⟨a† b⟩`
    pub adag_b: Complex64,
}

/// Ladder-operator expectation values, normalized by the trace.
pub fn ladder_moments(state: &TruncatedState) -> LadderMoments {
    let d = state.d;
    let mut m = LadderMoments {
        a: ZERO,
        b: ZERO,
        aa: ZERO,
        bb: ZERO,
        na: 0.0,
        nb: 0.0,
        ab: ZERO,
        adag_b: ZERO,
    };
    let sq = |k: usize| (k as f64).sqrt();
    for n1 in 0..d {
        for n2 in 0..d {
            let p = state.get(n1, n2, n1, n2).re;
            m.na += n1 as f64 * p;
            m.nb += n2 as f64 * p;
            if n1 + 1 < d {
                m.a += state.get(n1 + 1, n2, n1, n2) * sq(n1 + 1);
            }
            if n2 + 1 < d {
                m.b += state.get(n1, n2 + 1, n1, n2) * sq(n2 + 1);
            }
            if n1 + 2 < d {
                m.aa += state.get(n1 + 2, n2, n1, n2) * (sq(n1 + 1) * sq(n1 + 2));
            }
            if n2 + 2 < d {
                m.bb += state.get(n1, n2 + 2, n1, n2) * (sq(n2 + 1) * sq(n2 + 2));
            }
            if n1 + 1 < d && n2 + 1 < d {
                m.ab += state.get(n1 + 1, n2 + 1, n1, n2) * (sq(n1 + 1) * sq(n2 + 1));
            }
            if n1 >= 1 && n2 + 1 < d {
                m.adag_b += state.get(n1 - 1, n2 + 1, n1, n2) * (sq(n1) * sq(n2 + 1));
            }
        }
    }
    let tr = state.trace().re;
    LadderMoments {
        a: m.a / tr,
        b: m.b / tr,
        aa: m.aa / tr,
        bb: m.bb / tr,
        na: m.na / tr,
        nb: m.nb / tr,
        ab: m.ab / tr,
        adag_b: m.adag_b / tr,
    }
}

/// Quadrature means and symmetrized covariances of a Fock-space state.
pub fn moments_to_covariance(state: &TruncatedState) -> TwoModeGaussianState {
    let m = ladder_moments(state);
    let mean = Vector4::new(m.a.re, m.a.im, m.b.re, m.b.im);

    let single = |aa: Complex64, n: f64| {
        let base = (2.0 * n + 1.0) * VACUUM_VARIANCE;
        [base + 0.5 * aa.re, 0.5 * aa.im, base - 0.5 * aa.re]
    };
    let [xa, xya, ya] = single(m.aa, m.na);
    let [xb, xyb, yb] = single(m.bb, m.nb);
    let x1x2 = 0.5 * (m.ab.re + m.adag_b.re);
    let y1y2 = 0.5 * (m.adag_b.re - m.ab.re);
    let x1y2 = 0.5 * (m.ab.im + m.adag_b.im);
    let y1x2 = 0.5 * (m.ab.im - m.adag_b.im);

    #[rustfmt::skip]
    let second = Mat4::new(
        xa,   xya,  x1x2, x1y2,
        xya,  ya,   y1x2, y1y2,
        x1x2, y1x2, xb,   xyb,
        x1y2, y1y2, xyb,  yb,
    );
    TwoModeGaussianState {
        mean,
        cov: second - mean * mean.transpose(),
    }
}

/// Smallest eigenvalue of the partial transpose on mode 2.
pub fn ppt_min_eigenvalue(state: &TruncatedState) -> f64 {
    hermitian_min_eigenvalue(state.partial_transpose().to_matrix())
}

/// Separability verdict from the partial-transpose spectrum of a truncated
/// state. Negative eigenvalues smaller than the trace lost to truncation are
/// cutoff artifacts and do not count.
pub fn ppt_separable(ppt_min_eigenvalue: f64, leakage: f64) -> bool {
    ppt_min_eigenvalue >= -PPT_EIGENVALUE_FLOOR.max(leakage.abs())
}

/// Smallest eigenvalue of the state itself.
pub fn min_eigenvalue(state: &TruncatedState) -> f64 {
    hermitian_min_eigenvalue(state.to_matrix())
}
