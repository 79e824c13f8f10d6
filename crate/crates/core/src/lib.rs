//! Twin-beam entanglement in squeezed-thermal Gaussian channels.
//!
//! The Gaussian side ([`states`], [`channel`], [`separability`]) evolves the
//! covariance matrix in closed form and decides separability with the PPT
//! criterion. [`fock`] integrates the full two-mode master equation on a
//! truncated Fock space and serves as an independent check of everything on
//! the Gaussian side.

pub mod channel;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod separability;
pub mod states;

pub use channel::{
    derive_bath, diffusion_matrix, evolve, sigma_squared, stationary_covariance, BathSpec,
    DerivedBath, DiffusionMatrix,
};
pub use error::{Error, Result};
pub use separability::{
    char_poly_profile, ppt_margin, ppt_test, sigma_conditions, survival_time_closed,
    survival_time_numeric, survival_time_numeric_with, thermal_reference_time, BisectionOptions,
    PptReport, SigmaVerdict, SurvivalMethod, SurvivalResult,
};
pub use states::{
    physicality_check, twb_state, TwinBeamParams, TwoModeGaussianState, DEFAULT_TOLERANCE,
    VACUUM_VARIANCE,
};

pub use num_complex::Complex64;
