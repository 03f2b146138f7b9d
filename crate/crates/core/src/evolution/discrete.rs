use num_complex::Complex64;

use super::{Protocol, SensorState, StateMeta};
use crate::error::Result;
use crate::linalg::{Ket, ZERO};
use crate::protocol::PulseSequence;
use crate::signal::{theta_raw, SignalParams};

/// Exact final state and `∂_B` state of a pulse sequence.
///
/// Free windows apply `exp(-i ζ B Θ_k Z)`. The derivative is carried along in
/// the same forward pass: each window contributes `-i ζ Θ_k Z` acting on the
/// state at that point, then is propagated by every later operation.
pub fn evolve_discrete(seq: &PulseSequence, signal: &SignalParams) -> Result<SensorState> {
    seq.validate()?;
    Ok(propagate(seq, signal))
}

pub(crate) fn propagate(seq: &PulseSequence, signal: &SignalParams) -> SensorState {
    let zeta = signal.zeta;
    let zb = signal.coupling();
    let mut psi = seq.initial_state.ket();
    let mut dpsi: Ket = [ZERO, ZERO];

    let mut t = seq.start_time;
    let free = |psi: &mut Ket, dpsi: &mut Ket, t0: f64, t1: f64| {
        if t1 <= t0 {
            return;
        }
        let th = theta_raw(t0, t1, signal.omega, signal.phi);
        let e = Complex64::from_polar(1.0, -zb * th);
        let ec = e.conj();
        psi[0] *= e;
        psi[1] *= ec;
        dpsi[0] *= e;
        dpsi[1] *= ec;
        // += -iζΘ Z ψ
        let k = Complex64::new(0.0, -zeta * th);
        dpsi[0] += k * psi[0];
        dpsi[1] -= k * psi[1];
    };

    for p in &seq.pulses {
        free(&mut psi, &mut dpsi, t, p.time);
        t = p.time;
        let u = p.rotation.unitary();
        psi = u.apply(&psi);
        dpsi = u.apply(&dpsi);
    }
    free(&mut psi, &mut dpsi, t, seq.total_time);

    SensorState {
        psi,
        dpsi,
        meta: StateMeta {
            b: signal.b,
            omega: signal.omega,
            total_time: seq.total_time,
        },
    }
}

impl Protocol for PulseSequence {
    fn check(&self) -> Result<()> {
        Ok(self.validate()?)
    }

    fn evolve(&self, signal: &SignalParams) -> Result<SensorState> {
        Ok(propagate(self, signal))
    }

    fn total_time(&self) -> f64 {
        self.total_time
    }

    fn feature_frequency(&self, signal: &SignalParams) -> f64 {
        let spacing = self.min_spacing();
        let mut f = 1.0 / self.total_time;
        if spacing.is_finite() {
            f = f.max(1.0 / spacing);
        }
        f.max(signal.coupling().abs())
    }
}
