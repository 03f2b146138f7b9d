//! Monochromatic signal parameters and the accumulated-phase kernel Θ.
//!
//! The sensor sees `H(t) = ζ B cos(ωt + φ) Z` (ħ = 1, all frequencies in
//! rad/s). Over a free-evolution window `[t0, t1]` the propagator is
//! `exp(-i ζ B Θ Z)` with
//!
//! ```text
//! Θ(t1, t0) = (sin(ω t1 + φ) − sin(ω t0 + φ)) / ω
//! ```

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this value of `|ω|·max(t0, t1)` Θ is evaluated from its Taylor series.
pub const SMALL_OMEGA_THRESHOLD: f64 = 1e-4;

/// A signal `B cos(ωt + φ)` seen through the coupling `ζ = μ/ħ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalParams {
    /// Field amplitude.
    pub b: f64,
    /// Angular frequency (rad/s), non-negative.
    pub omega: f64,
    /// Phase offset, kept in `[0, 2π)`.
    pub phi: f64,
    /// Coupling in rad/s per field unit, strictly positive.
    pub zeta: f64,
}

impl SignalParams {
    /// Builds a validated signal. `phi` is wrapped into `[0, 2π)`.
    pub fn new(b: f64, omega: f64, phi: f64, zeta: f64) -> Result<Self> {
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "omega must be >= 0, got {omega}"
            )));
        }
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "zeta must be > 0, got {zeta}"
            )));
        }
        if !b.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidParameter("B and phi must be finite".into()));
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self {
            b,
            omega,
            phi,
            zeta,
        })
    }

    /// Zero-phase signal with unit coupling.
    pub fn dc(b: f64) -> Self {
        Self {
            b,
            omega: 0.0,
            phi: 0.0,
            zeta: 1.0,
        }
    }

    pub fn with_omega(self, omega: f64) -> Self {
        Self { omega, ..self }
    }

    pub fn with_b(self, b: f64) -> Self {
        Self { b, ..self }
    }

    pub fn with_phi(self, phi: f64) -> Self {
        Self {
            phi: phi.rem_euclid(TAU),
            ..self
        }
    }

    pub fn with_zeta(self, zeta: f64) -> Self {
        Self { zeta, ..self }
    }

    /// `ζB`, the signal strength as an angular frequency.
    pub fn coupling(&self) -> f64 {
        self.zeta * self.b
    }

    /// Instantaneous coefficient of `Z`: `ζ B cos(ωt + φ)`.
    pub fn field_at(&self, t: f64) -> f64 {
        self.coupling() * (self.omega * t + self.phi).cos()
    }
}

impl Default for SignalParams {
    fn default() -> Self {
        Self::dc(0.0)
    }
}

/// A closed window `[t0, t1]` with `0 ≤ t0 ≤ t1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeInterval {
    pub t0: f64,
    pub t1: f64,
}

impl TimeInterval {
    pub fn new(t0: f64, t1: f64) -> Result<Self> {
        if !(t0 >= 0.0 && t1 >= t0 && t1.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "interval requires 0 <= t0 <= t1, got [{t0}, {t1}]"
            )));
        }
        Ok(Self { t0, t1 })
    }

    pub fn duration(&self) -> f64 {
        self.t1 - self.t0
    }
}

/// Accumulated phase Θ over `interval` (seconds).
pub fn theta(interval: TimeInterval, signal: &SignalParams) -> f64 {
    theta_raw(interval.t0, interval.t1, signal.omega, signal.phi)
}

pub(crate) fn theta_raw(t0: f64, t1: f64, omega: f64, phi: f64) -> f64 {
    let dt = t1 - t0;
    if omega.abs() * t0.abs().max(t1.abs()) < SMALL_OMEGA_THRESHOLD {
        return theta_series(t0, t1, omega, phi);
    }
    // sin a − sin b = 2 cos((a+b)/2) sin((a−b)/2); no cancellation for short windows.
    let mid = 0.5 * (t0 + t1);
    2.0 * (omega * mid + phi).cos() * (0.5 * omega * dt).sin() / omega
}

/// Θ through order ω³.
fn theta_series(t0: f64, t1: f64, omega: f64, phi: f64) -> f64 {
    let dt = t1 - t0;
    let (s, c) = phi.sin_cos();
    // (t1ⁿ − t0ⁿ) / (t1 − t0) without cancellation
    let p2 = t1 + t0;
    let p3 = t1 * t1 + t1 * t0 + t0 * t0;
    let p4 = p2 * (t1 * t1 + t0 * t0);
    let w = omega;
    dt * (c - w * p2 * s / 2.0 - w * w * p3 * c / 6.0 + w * w * w * p4 * s / 24.0)
}

/// Θ for every window between consecutive entries of `times`.
///
/// Equal adjacent times are allowed and give Θ = 0.
pub fn theta_vector(times: &[f64], signal: &SignalParams) -> Result<Vec<f64>> {
    check_non_decreasing(times)?;
    Ok(times
        .windows(2)
        .map(|w| theta_raw(w[0], w[1], signal.omega, signal.phi))
        .collect())
}

pub(crate) fn check_non_decreasing(times: &[f64]) -> Result<()> {
    for (i, w) in times.windows(2).enumerate() {
        if !(w[1] >= w[0]) {
            return Err(Error::Ordering {
                index: i + 1,
                prev: w[0],
                next: w[1],
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use proptest::prelude::*;

    use super::*;

    fn sig(omega: f64, phi: f64) -> SignalParams {
        SignalParams::new(1.0, omega, phi, 1.0).unwrap()
    }

    fn iv(t0: f64, t1: f64) -> TimeInterval {
        TimeInterval::new(t0, t1).unwrap()
    }

    #[test]
    fn full_period_vanishes() {
        assert!(theta(iv(0.0, 1.0), &sig(2.0 * PI, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn dc_limit() {
        assert_eq!(theta(iv(0.0, 2.0), &sig(0.0, 0.0)), 2.0);
        assert!((theta(iv(0.0, 2.0), &sig(1e-12, 0.0)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn quarter_period() {
        let v = theta(iv(0.0, 1.0), &sig(PI / 2.0, 0.0));
        assert!((v - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn vector_examples() {
        let v = theta_vector(&[0.0, 1.0, 2.0], &sig(2.0 * PI, 0.0)).unwrap();
        assert!(v.iter().all(|x| x.abs() < 1e-15));
        assert_eq!(
            theta_vector(&[0.0, 1.0], &sig(0.0, 0.0)).unwrap(),
            vec![1.0]
        );
        let v = theta_vector(&[0.0, 0.5, 1.0], &sig(PI, 0.0)).unwrap();
        assert!((v[0] - 1.0 / PI).abs() < 1e-15);
        assert!((v[1] + 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn vector_rejects_decreasing_times() {
        let err = theta_vector(&[0.0, 2.0, 1.0], &sig(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Ordering { index: 2, .. }));
        // repeated times are fine
        assert_eq!(
            theta_vector(&[0.0, 1.0, 1.0], &sig(0.0, 0.0)).unwrap(),
            vec![1.0, 0.0]
        );
    }

    #[test]
    fn rejects_bad_params() {
        assert!(SignalParams::new(1.0, -1.0, 0.0, 1.0).is_err());
        assert!(SignalParams::new(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(TimeInterval::new(2.0, 1.0).is_err());
        assert!(TimeInterval::new(-1.0, 1.0).is_err());
        let s = SignalParams::new(1.0, 1.0, -PI / 2.0, 1.0).unwrap();
        assert!((s.phi - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn branches_agree_at_threshold() {
        for &phi in &[0.0, 0.3, PI / 2.0, 2.5, 4.0] {
            for &(t0, t1) in &[(0.0, 1.0), (0.5, 1.0), (0.999, 1.0), (0.0, 3.0)] {
                let w = SMALL_OMEGA_THRESHOLD / t1;
                let series = theta_series(t0, t1, w, phi);
                let direct =
                    2.0 * (w * 0.5 * (t0 + t1) + phi).cos() * (0.5 * w * (t1 - t0)).sin() / w;
                // near cos φ = 0 the direct branch loses digits to cancellation in
                // ωt + φ, so compare against the segment length as well
                let scale = series.abs().max(t1 - t0);
                assert!(
                    (series - direct).abs() <= 1e-12 * scale,
                    "phi={phi} [{t0},{t1}]: {series} vs {direct}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn bounded_by_duration_and_two_over_omega(
            t0 in 0.0..10.0f64, dt in 0.0..10.0f64, omega in 0.0..50.0f64, phi in 0.0..TAU,
        ) {
            let v = theta(iv(t0, t0 + dt), &sig(omega, phi));
            prop_assert!(v.abs() <= dt * (1.0 + 1e-12) + 1e-15);
            if omega > 0.0 {
                prop_assert!(v.abs() <= 2.0 / omega * (1.0 + 1e-12));
            }
        }

        #[test]
        fn additive_over_split_windows(
            t0 in 0.0..10.0f64, a in 0.0..5.0f64, b in 0.0..5.0f64,
            omega in 0.0..30.0f64, phi in 0.0..TAU,
        ) {
            let s = sig(omega, phi);
            let whole = theta(iv(t0, t0 + a + b), &s);
            let parts = theta(iv(t0, t0 + a), &s) + theta(iv(t0 + a, t0 + a + b), &s);
            prop_assert!((whole - parts).abs() <= 1e-13 * (1.0 + t0 + a + b));
        }
    }
}
