mod common;

use std::f64::consts::PI;

use common::{rk4_convergence_ratio, trajectory, unit_bath};
use twb_core::fock::{
    integrate, moments_to_covariance, ppt_min_eigenvalue, twb_density, OracleConfig, TruncatedState,
};
use twb_core::{twb_state, Error, TwinBeamParams};

#[test]
fn twb_density_moments() {
    let (rho, deficit) = twb_density(1.0, 32, 1e-6).unwrap();
    assert!(deficit <= 1e-6);
    let fock = moments_to_covariance(&rho);
    let gauss = twb_state(TwinBeamParams::new(1.0).unwrap());
    assert!((fock.cov - gauss.cov).amax() < 1e-6);
    assert!(fock.mean.amax() < 1e-12);
}

#[test]
fn twb_density_moments_match_truncated_series() {
    // At d = 30 the missing tail alone shifts the cross correlation by 1.58e-6.
    let d = 30;
    let xi = 1.0f64.tanh();
    let weight = |p: usize| (1.0 - xi * xi) * xi.powi(2 * p as i32);
    let z: f64 = (0..d).map(weight).sum();
    let n: f64 = (0..d).map(|p| p as f64 * weight(p)).sum::<f64>() / z;
    let ab: f64 = (0..d - 1)
        .map(|p| (p + 1) as f64 * weight(p) * xi)
        .sum::<f64>()
        / z;
    let (rho, _) = twb_density(1.0, d, 1e-6).unwrap();
    let cov = moments_to_covariance(&rho).cov;
    assert!((cov[(0, 0)] - (2.0 * n + 1.0) / 4.0).abs() < 1e-12);
    assert!((cov[(0, 2)] - ab / 2.0).abs() < 1e-12);
    assert!((cov[(1, 3)] + ab / 2.0).abs() < 1e-12);
}

#[test]
fn twb_density_reports_minimal_cutoff() {
    match twb_density(1.0, 10, 1e-6) {
        Err(Error::Truncation {
            min_cutoff: Some(d),
            ..
        }) => {
            assert!(d > 10);
            assert!(twb_density(1.0, d, 1e-6).is_ok());
            assert!(twb_density(1.0, d - 1, 1e-6).is_err());
        }
        other => panic!("expected a truncation error, got {other:?}"),
    }
}

#[test]
fn pure_loss_moments() {
    let s = trajectory(0.5, &unit_bath(0.0, 0.0, 0.0), 25, 1e-6, &[1.0], &[false]);
    assert!(s[0].cov_discrepancy < 1e-5, "{:?}", s[0]);
}

#[test]
fn phase_sensitive_bath_moments() {
    let s = trajectory(
        0.8,
        &unit_bath(0.5, 0.07, PI / 5.0),
        25,
        1e-6,
        &[0.6],
        &[false],
    );
    assert!(s[0].cov_discrepancy < 1e-4, "{:?}", s[0]);
    assert!(s[0].leakage < 1e-6);
}

#[test]
fn zero_time_is_identity() {
    let (rho, _) = twb_density(0.7, 12, 1e-3).unwrap();
    let config = OracleConfig {
        d: 12,
        t_final: 0.0,
        ..OracleConfig::default()
    };
    let out = integrate(&rho, &unit_bath(1.0, 0.1, 0.0), &config).unwrap();
    assert_eq!(out.steps, 0);
    assert_eq!(out.state, rho);
}

#[test]
fn leakage_above_tolerance_is_an_error() {
    let (rho, _) = twb_density(1.0, 8, 1.0).unwrap();
    let config = OracleConfig {
        d: 8,
        t_final: 0.5,
        trunc_tol: 1e-8,
        ..OracleConfig::default()
    };
    let err = integrate(&rho, &unit_bath(1.0, 0.5, 0.0), &config).unwrap_err();
    assert!(matches!(err, Error::Truncation { .. }), "{err:?}");
}

#[test]
fn rk4_is_fourth_order() {
    let (rho, _) = twb_density(0.5, 6, 1.0).unwrap();
    let ratio = rk4_convergence_ratio(&rho, &unit_bath(0.5, 0.07, PI / 5.0), 0.5);
    assert!((ratio - 16.0).abs() <= 2.0, "ratio {ratio}");
}

#[test]
fn halving_default_step_is_converged() {
    let (rho, _) = twb_density(0.5, 12, 1e-3).unwrap();
    let bath = unit_bath(0.5, 0.07, PI / 5.0);
    let run = |dt: f64| {
        let config = OracleConfig {
            d: 12,
            dt,
            t_final: 0.5,
            trunc_tol: 1e-3,
        };
        moments_to_covariance(&integrate(&rho, &bath, &config).unwrap().state)
    };
    let coarse = run(0.01);
    let fine = run(0.005);
    assert!((coarse.cov - fine.cov).amax() < 1e-8);
}

#[test]
fn partial_transpose_sign() {
    let (rho, _) = twb_density(1.0, 30, 1e-6).unwrap();
    assert!(ppt_min_eigenvalue(&rho) < -0.1);
    let product = TruncatedState::thermal_product(0.3, 10).unwrap();
    assert!(ppt_min_eigenvalue(&product) >= -1e-10);
}

#[test]
fn evolution_keeps_state_valid() {
    let (rho, _) = twb_density(0.6, 15, 1e-4).unwrap();
    let config = OracleConfig {
        d: 15,
        t_final: 0.4,
        trunc_tol: 1e-4,
        ..OracleConfig::default()
    };
    let out = integrate(&rho, &unit_bath(0.5, 0.1, 1.0), &config).unwrap();
    assert!(out.state.hermiticity_error() < 1e-10);
    assert!(out.leakage >= -1e-10 && out.leakage <= 1e-4);
    assert!(twb_core::fock::min_eigenvalue(&out.state) >= -1e-8);
}
