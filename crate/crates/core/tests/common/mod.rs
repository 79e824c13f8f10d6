#![allow(dead_code)]

use twb_core::fock::{
    generator_bound, integrate, moments_to_covariance, ppt_min_eigenvalue, twb_density,
    OracleConfig, TruncatedState,
};
use twb_core::{derive_bath, evolve, ppt_margin, twb_state, BathSpec, DerivedBath, TwinBeamParams};

/// One oracle sample compared against the Gaussian solution at the same `Γt`.
#[derive(Debug, Clone, Copy)]
pub struct Sample {
    pub gt: f64,
    pub cov_discrepancy: f64,
    pub mean_discrepancy: f64,
    pub gaussian_margin: f64,
    pub fock_ppt: Option<f64>,
    pub leakage: f64,
}

pub fn unit_bath(n_th: f64, n_s: f64, theta: f64) -> DerivedBath {
    derive_bath(BathSpec::unit_rate(n_th, n_s, theta).unwrap()).unwrap()
}

/// Integrates the truncated twin beam through increasing times `times`,
/// comparing moments at each. PPT is computed only where `ppt[i]` is set.
pub fn trajectory(
    lambda: f64,
    bath: &DerivedBath,
    d: usize,
    trunc_tol: f64,
    times: &[f64],
    ppt: &[bool],
) -> Vec<Sample> {
    let (mut rho, _) = twb_density(lambda, d, trunc_tol).unwrap();
    let gaussian0 = twb_state(TwinBeamParams::new(lambda).unwrap());
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for (i, &gt) in times.iter().enumerate() {
        assert!(gt >= now, "sample times must increase");
        let config = OracleConfig {
            d,
            dt: 0.01,
            t_final: gt - now,
            trunc_tol,
        };
        rho = integrate(&rho, bath, &config).unwrap().state;
        now = gt;
        let fock = moments_to_covariance(&rho);
        let gauss = evolve(&gaussian0, bath, gt / bath.damping()).unwrap();
        out.push(Sample {
            gt,
            cov_discrepancy: (fock.cov - gauss.cov).amax(),
            mean_discrepancy: (fock.mean - gauss.mean).amax(),
            gaussian_margin: ppt_margin(&gauss),
            fock_ppt: ppt
                .get(i)
                .copied()
                .unwrap_or(false)
                .then(|| ppt_min_eigenvalue(&rho)),
            leakage: 1.0 - rho.trace().re,
        });
    }
    out
}

/// Ratio of successive step-halving differences of the final state; close to
/// 16 for a fourth-order scheme.
pub fn rk4_convergence_ratio(rho: &TruncatedState, bath: &DerivedBath, t_final: f64) -> f64 {
    let d = rho.cutoff();
    let stable = 2.5 * bath.damping() / generator_bound(bath, d);
    let steps = (4.0 * t_final / stable).ceil();
    let run = |k: f64| {
        let config = OracleConfig {
            d,
            dt: t_final / (steps * k),
            t_final,
            trunc_tol: 1.0,
        };
        let r = integrate(rho, bath, &config).unwrap();
        assert_eq!(r.steps, (steps * k) as usize);
        r.state
    };
    let (a, b, c) = (run(1.0), run(2.0), run(4.0));
    let diff = |x: &TruncatedState, y: &TruncatedState| {
        x.as_slice()
            .iter()
            .zip(y.as_slice())
            .map(|(p, q)| (p - q).norm())
            .fold(0.0f64, f64::max)
    };
    diff(&a, &b) / diff(&b, &c)
}
