//! Finite-difference QFI, independent of the analytic derivative path.
//!
//! Only `|ψ(B)⟩` is sampled; `∂_B|ψ⟩` comes from central differences at
//! steps `h` and `h/2`, combined by one Richardson level.

use super::{qfi, Protocol, SensorState};
use crate::error::{Error, Result};
use crate::linalg::{Ket, ZERO};
use crate::signal::SignalParams;

/// Richardson levels disagreeing by more than this (relative) flag the step.
pub const RICHARDSON_CHECK: f64 = 1e-4;

/// Default step `10⁻⁶ · max(1, |B|)`.
pub fn default_step(b: f64) -> f64 {
    1e-6 * b.abs().max(1.0)
}

fn central(protocol: &dyn Protocol, signal: &SignalParams, h: f64) -> Result<Ket> {
    let up = protocol.evolve(&signal.with_b(signal.b + h))?.psi;
    let dn = protocol.evolve(&signal.with_b(signal.b - h))?.psi;
    let s = 0.5 / h;
    Ok([(up[0] - dn[0]) * s, (up[1] - dn[1]) * s])
}

/// `∂_B|ψ⟩` from central differences at `h` and `h/2`, Richardson-combined.
pub fn richardson_derivative(
    protocol: &dyn Protocol,
    signal: &SignalParams,
    step: f64,
) -> Result<Ket> {
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step must be > 0, got {step}"
        )));
    }
    let coarse = central(protocol, signal, step)?;
    let fine = central(protocol, signal, 0.5 * step)?;
    let mut diff = 0.0f64;
    let mut size = 0.0f64;
    let mut out = [ZERO, ZERO];
    for i in 0..2 {
        diff = diff.max((fine[i] - coarse[i]).norm());
        size = size.max(fine[i].norm());
        out[i] = (fine[i] * 4.0 - coarse[i]) / 3.0;
    }
    let disagreement = diff / size.max(1.0);
    if disagreement > RICHARDSON_CHECK {
        return Err(Error::FiniteDifferenceStep { disagreement });
    }
    Ok(out)
}

/// QFI with the derivative state replaced by finite differences.
pub fn qfi_fd_oracle(protocol: &dyn Protocol, signal: &SignalParams, step: f64) -> Result<f64> {
    let dpsi = richardson_derivative(protocol, signal, step)?;
    let base = protocol.evolve(signal)?;
    Ok(qfi(&SensorState { dpsi, ..base }))
}
