//! n-qubit GHZ probes in their two-dimensional invariant subspace.
//!
//! `U^{⊗n}` acts on `{|0…0⟩, |1…1⟩}` as `exp(-i n ζ B Θ Z)`, and collective π
//! rotations about X, Y or Z keep the subspace invariant, so the whole
//! protocol reduces to a qubit with an n-fold enhanced coupling.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{qfi, Protocol, SensorState, StateMeta};
use crate::error::{Error, Result};
use crate::linalg::{Ket, Mat2, ONE, ZERO};
use crate::protocol::{PulseSequence, Rotation};
use crate::signal::{check_non_decreasing, theta_raw, SignalParams};

#[derive(Debug, Clone, PartialEq)]
pub struct GhzProtocol {
    pub n: usize,
    /// Free-evolution window boundaries `t₀ ≤ t₁ ≤ … ≤ T`.
    pub boundaries: Vec<f64>,
    /// Collective operator applied at each interior boundary, in the reduced basis.
    pub flips: Vec<Mat2>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzState {
    pub n: usize,
    /// Signed sum `Σ ±Θ_i`; the sign flips after each collective X or Y flip.
    pub accumulated_phase: f64,
    /// Amplitudes on `|0…0⟩` and `|1…1⟩` with their `B`-derivatives.
    pub state: SensorState,
}

impl GhzState {
    pub fn qfi(&self) -> f64 {
        qfi(&self.state)
    }
}

impl GhzProtocol {
    /// Pure free evolution over `boundaries`, no flips.
    pub fn free(n: usize, boundaries: Vec<f64>) -> Result<Self> {
        let flips = vec![Mat2::identity(); boundaries.len().saturating_sub(2)];
        let p = Self {
            n,
            boundaries,
            flips,
        };
        p.check()?;
        Ok(p)
    }

    /// Lifts a single-qubit sequence of π rotations about X, Y or Z to
    /// collective rotations on the GHZ subspace. Any other pulse is rejected.
    pub fn from_sequence(n: usize, seq: &PulseSequence) -> Result<Self> {
        seq.validate()?;
        if seq.initial_state != crate::protocol::InitialState::PLUS {
            return Err(Error::Unsupported(
                "GHZ protocols start from the GHZ state".into(),
            ));
        }
        let flips = seq
            .pulses
            .iter()
            .enumerate()
            .map(|(i, p)| {
                collective(n, &p.rotation).ok_or_else(|| {
                    Error::Unsupported(format!(
                        "pulse {i} is not a collective π rotation about X, Y or Z"
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let p = Self {
            n,
            boundaries: seq.boundaries(),
            flips,
        };
        p.check()?;
        Ok(p)
    }

    fn frequency_floor(&self) -> f64 {
        self.boundaries
            .windows(2)
            .map(|w| w[1] - w[0])
            .filter(|d| *d > 0.0)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Reduced-basis action of `R^{⊗n}` for a π rotation `R`.
fn collective(n: usize, rotation: &Rotation) -> Option<Mat2> {
    let Rotation::AxisAngle { axis, angle } = *rotation else {
        return None;
    };
    let pi = std::f64::consts::PI;
    if ((angle.abs() - pi).abs()) > 1e-12 {
        return None;
    }
    // exp(-iπ/2 σ) = -i σ, so R^{⊗n} = (-i)ⁿ σ^{⊗n}
    let global = Complex64::new(0.0, -angle.signum()).powu(n as u32);
    let i_n = Complex64::new(0.0, 1.0).powu(n as u32);
    let unit = |v: f64, target: f64| (v - target).abs() <= 1e-12;
    let m = if unit(axis[0], 1.0) && unit(axis[1], 0.0) && unit(axis[2], 0.0) {
        Mat2::new(ZERO, ONE, ONE, ZERO)
    } else if unit(axis[0], 0.0) && unit(axis[1], 1.0) && unit(axis[2], 0.0) {
        // σ_y|0⟩ = i|1⟩, σ_y|1⟩ = -i|0⟩
        Mat2::new(ZERO, i_n.conj(), i_n, ZERO)
    } else if unit(axis[0], 0.0) && unit(axis[1], 0.0) && unit(axis[2], 1.0) {
        let sign = if n % 2 == 0 { ONE } else { -ONE };
        Mat2::new(ONE, ZERO, ZERO, sign)
    } else {
        return None;
    };
    Some(m.scale(global))
}

/// Evolves the GHZ state through `protocol` and returns the reduced state.
pub fn evolve_ghz(protocol: &GhzProtocol, signal: &SignalParams) -> Result<GhzState> {
    protocol.check()?;
    Ok(propagate(protocol, signal))
}

fn propagate(p: &GhzProtocol, signal: &SignalParams) -> GhzState {
    let nf = p.n as f64;
    let zeta = nf * signal.zeta;
    let zb = zeta * signal.b;
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut psi: Ket = [h, h];
    let mut dpsi: Ket = [ZERO, ZERO];
    let mut phase = 0.0;
    let mut sign = 1.0;
    for (k, w) in p.boundaries.windows(2).enumerate() {
        let th = theta_raw(w[0], w[1], signal.omega, signal.phi);
        let e = Complex64::from_polar(1.0, -zb * th);
        psi = [psi[0] * e, psi[1] * e.conj()];
        dpsi = [dpsi[0] * e, dpsi[1] * e.conj()];
        let kk = Complex64::new(0.0, -zeta * th);
        dpsi[0] += kk * psi[0];
        dpsi[1] -= kk * psi[1];
        phase += sign * th;
        if let Some(f) = p.flips.get(k) {
            psi = f.apply(&psi);
            dpsi = f.apply(&dpsi);
            if f.a.norm() < 0.5 {
                sign = -sign;
            }
        }
    }
    let total_time = *p.boundaries.last().unwrap_or(&0.0);
    GhzState {
        n: p.n,
        accumulated_phase: phase,
        state: SensorState {
            psi,
            dpsi,
            meta: StateMeta {
                b: signal.b,
                omega: signal.omega,
                total_time,
            },
        },
    }
}

impl Protocol for GhzProtocol {
    fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("GHZ needs n >= 1".into()));
        }
        if self.boundaries.len() < 2 || self.boundaries[0] < 0.0 {
            return Err(Error::InvalidParameter(
                "GHZ needs at least one window starting at t >= 0".into(),
            ));
        }
        check_non_decreasing(&self.boundaries)?;
        if self.flips.len() + 2 != self.boundaries.len() {
            return Err(Error::InvalidParameter(
                "one collective operator per interior boundary".into(),
            ));
        }
        if *self.boundaries.last().unwrap() <= self.boundaries[0] {
            return Err(Error::InvalidParameter(
                "GHZ protocol has zero duration".into(),
            ));
        }
        Ok(())
    }

    fn evolve(&self, signal: &SignalParams) -> Result<SensorState> {
        Ok(propagate(self, signal).state)
    }

    fn total_time(&self) -> f64 {
        *self.boundaries.last().unwrap()
    }

    fn feature_frequency(&self, signal: &SignalParams) -> f64 {
        let mut f = 1.0 / self.total_time();
        let s = self.frequency_floor();
        if s.is_finite() {
            f = f.max(1.0 / s);
        }
        f.max(self.n as f64 * signal.coupling().abs())
    }
}
