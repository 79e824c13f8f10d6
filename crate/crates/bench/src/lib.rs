//! Fixtures shared by the criterion benches.

use twb_core::{derive_bath, BathSpec, DerivedBath};

/// Bath at the parameters of the out-of-phase checkpoint (`θ = π/5`).
pub fn out_of_phase_bath() -> DerivedBath {
    derive_bath(BathSpec::unit_rate(0.5, 0.07, std::f64::consts::PI / 5.0).unwrap()).unwrap()
}

pub fn in_phase_bath() -> DerivedBath {
    derive_bath(BathSpec::unit_rate(1.0, 0.1, 0.0).unwrap()).unwrap()
}
