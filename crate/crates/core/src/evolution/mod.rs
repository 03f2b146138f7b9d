//! Final sensor states, their `B`-derivatives, and the pure-state QFI.
//!
//! Every protocol produces a [`SensorState`]: the final state `|ψ⟩` and the
//! derivative `|φ⟩ = ∂_B|ψ⟩`. The quantum Fisher information for `B` is then
//!
//! ```text
//! J(B|ω) = 4 (⟨φ|φ⟩ + Re⟨φ|ψ⟩²)
//! ```
//!
//! Normalization forces `⟨φ|ψ⟩` to be purely imaginary, so the second term is
//! never positive and `J ≤ 4⟨φ|φ⟩`.

mod continuous;
mod discrete;
mod ghz;
pub mod oracle;

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{self, Ket};
use crate::signal::SignalParams;

pub use continuous::{evolve_continuous, ContinuousProtocol, DEFAULT_ODE_TOL};
pub use discrete::evolve_discrete;
pub use ghz::{evolve_ghz, GhzProtocol, GhzState};
pub use oracle::{qfi_fd_oracle, richardson_derivative};

/// Where a state came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateMeta {
    pub b: f64,
    pub omega: f64,
    pub total_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorState {
    pub psi: Ket,
    pub dpsi: Ket,
    pub meta: StateMeta,
}

impl SensorState {
    pub fn norm(&self) -> f64 {
        linalg::norm_sqr(&self.psi).sqrt()
    }

    /// `⟨φ|ψ⟩`
    pub fn overlap(&self) -> Complex64 {
        linalg::inner(&self.dpsi, &self.psi)
    }

    /// `⟨φ|φ⟩`
    pub fn derivative_norm_sqr(&self) -> f64 {
        linalg::norm_sqr(&self.dpsi)
    }
}

/// Pure-state QFI `4(⟨φ|φ⟩ + Re⟨φ|ψ⟩²)`, floored at zero.
pub fn qfi(state: &SensorState) -> f64 {
    let ov = state.overlap();
    (4.0 * (state.derivative_norm_sqr() + (ov * ov).re)).max(0.0)
}

/// A sensing protocol that can be evaluated at any signal frequency.
pub trait Protocol: Sync {
    /// Structural validation; called once before sweeps.
    fn check(&self) -> Result<()>;

    /// Final state and derivative state for `signal`. Assumes [`check`](Self::check) passed.
    fn evolve(&self, signal: &SignalParams) -> Result<SensorState>;

    fn qfi(&self, signal: &SignalParams) -> Result<f64> {
        Ok(qfi(&self.evolve(signal)?))
    }

    fn total_time(&self) -> f64;

    /// Highest intrinsic rate of the protocol (rad/s): control rates, the
    /// signal strength and the inverse of its shortest time scale.
    fn feature_frequency(&self, signal: &SignalParams) -> f64;
}
