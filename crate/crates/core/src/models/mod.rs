//! Closed-form model amplitudes and a fixed-step propagator.

mod expanding;
mod frozen;
mod packet;
mod propagate;
mod two_state;

use crate::error::Result;
use crate::C64;

pub use expanding::{ExpandingParams, PhaseSplit};
pub use frozen::FrozenGaussianParams;
pub use packet::PacketParams;
pub use propagate::{propagate, MatrixHamiltonian, PropagateOptions, Propagation};
pub use two_state::TwoStateParams;

/// Ground-state amplitude `C_g(t)` of the rotating two-level model.
pub fn two_state_amplitude(p: &TwoStateParams, t: C64) -> C64 {
    p.amplitude(t)
}

pub fn expanding_log_modulus(p: &ExpandingParams, t: f64) -> f64 {
    p.log_modulus(t)
}

pub fn expanding_phase(p: &ExpandingParams, split: &PhaseSplit, t: f64) -> f64 {
    p.phase(split, t)
}

pub fn packet_log_amplitude(p: &PacketParams, t: C64) -> Result<C64> {
    p.log_amplitude(t)
}

pub fn frozen_gaussian_log(p: &FrozenGaussianParams, t: f64) -> C64 {
    p.log_g(t)
}

pub fn perturbed_two_state(p: &TwoStateParams, eps: f64) -> MatrixHamiltonian {
    p.perturbed_hamiltonian(eps)
}

pub(crate) fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(crate::Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}
