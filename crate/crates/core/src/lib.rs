//! Quantum Fisher information spectra for qubit sensing protocols.
//!
//! A qubit couples to a monochromatic signal `B cos(ωt + φ)` through
//! `H = ζ B cos(ωt + φ) Z`. For a given control protocol this crate computes
//! the QFI spectrum `J(B|ω)`, its integral over all frequencies
//! `K(T) = ∫₀^∞ J(B|ω) dω`, and a set of closed-form references and bounds
//! to check them against.
//!
//! - [`signal`]: signal parameters and the accumulated phase Θ.
//! - [`protocol`]: pulse sequences, continuous controls, JSON documents.
//! - [`evolution`]: final and derivative states, QFI, finite-difference oracle.
//! - [`iqfi`]: semi-infinite oscillatory quadrature, Haar averages, sweeps.
//! - [`bounds`]: analytic references and bound checks.
//! - [`cli`]: the `iqfi-lab` command-line front end.
//!
//! Units: angular frequencies in rad/s, times in seconds, ħ = 1.

pub mod bounds;
pub mod cli;
mod error;
pub mod evolution;
pub mod iqfi;
pub mod linalg;
pub mod protocol;
pub mod signal;

pub use error::{Error, Result};
pub use evolution::{qfi, Protocol, SensorState};
pub use signal::{theta, theta_vector, SignalParams, TimeInterval};
