//! Sensing protocols: instantaneous pulse sequences and continuous controls.

mod format;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2};

pub use format::{DecodedProtocol, ProtocolDocument, PulseDoc, SegmentDoc};

/// Tolerance for unitarity, hermiticity and axis normalization checks.
pub const STRUCTURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn unit(self) -> [f64; 3] {
        match self {
            Axis::X => [1.0, 0.0, 0.0],
            Axis::Y => [0.0, 1.0, 0.0],
            Axis::Z => [0.0, 0.0, 1.0],
        }
    }
}

/// An SU(2) element, either as a rotation `exp(-i angle/2 n̂·σ)` or a raw matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rotation {
    AxisAngle { axis: [f64; 3], angle: f64 },
    Matrix(Mat2),
}

impl Rotation {
    /// Rotation about `axis`, normalized here.
    pub fn about(axis: [f64; 3], angle: f64) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let axis = if n > 0.0 {
            [axis[0] / n, axis[1] / n, axis[2] / n]
        } else {
            axis
        };
        Rotation::AxisAngle { axis, angle }
    }

    pub fn unitary(&self) -> Mat2 {
        match *self {
            Rotation::AxisAngle { axis, angle } => linalg::rotation(axis, angle),
            Rotation::Matrix(m) => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub time: f64,
    pub rotation: Rotation,
}

impl Pulse {
    pub fn new(time: f64, rotation: Rotation) -> Self {
        Self { time, rotation }
    }

    pub fn about(time: f64, axis: Axis, angle: f64) -> Self {
        Self::new(
            time,
            Rotation::AxisAngle {
                axis: axis.unit(),
                angle,
            },
        )
    }
}

/// Bloch angles of the initial state `cos(α/2)|0⟩ + e^{iβ} sin(α/2)|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub alpha: f64,
    pub beta: f64,
}

impl InitialState {
    /// `|+⟩`
    pub const PLUS: Self = Self {
        alpha: FRAC_PI_2,
        beta: 0.0,
    };

    pub fn ket(&self) -> linalg::Ket {
        linalg::bloch_ket(self.alpha, self.beta)
    }
}

impl Default for InitialState {
    fn default() -> Self {
        Self::PLUS
    }
}

/// Free evolution from `start_time` to `total_time`, interrupted by
/// instantaneous pulses.
///
/// A pulse at `t` acts after the free segment ending at `t`; pulses sharing
/// a time act in list order.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pub pulses: Vec<Pulse>,
    pub total_time: f64,
    /// Start of the sensing window; zero for every named protocol.
    pub start_time: f64,
    pub initial_state: InitialState,
}

/// First structural problem found in a protocol.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    NonPositiveDuration(f64),
    StartOutOfRange(f64),
    TimeOutOfRange { index: usize, time: f64 },
    Unordered { index: usize },
    AxisNotNormalized { index: usize, norm: f64 },
    NotUnitary { index: usize, defect: f64 },
    NonFinite { index: usize },
    NotHermitian { index: usize, defect: f64 },
    Tiling { index: usize },
    InvalidDrive(f64),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NonPositiveDuration(t) => write!(f, "total time must be > 0 (got {t})"),
            Diagnostic::StartOutOfRange(t) => write!(f, "start time {t} out of range"),
            Diagnostic::TimeOutOfRange { index, time } => {
                write!(f, "pulse {index}: time out of range ({time})")
            }
            Diagnostic::Unordered { index } => write!(f, "pulse {index}: times not non-decreasing"),
            Diagnostic::AxisNotNormalized { index, norm } => {
                write!(f, "pulse {index}: axis not normalized (|n| = {norm})")
            }
            Diagnostic::NotUnitary { index, defect } => {
                write!(f, "pulse {index}: not unitary (defect {defect:e})")
            }
            Diagnostic::NonFinite { index } => write!(f, "entry {index}: non-finite value"),
            Diagnostic::NotHermitian { index, defect } => {
                write!(
                    f,
                    "segment {index}: generator not Hermitian (defect {defect:e})"
                )
            }
            Diagnostic::Tiling { index } => {
                write!(f, "segment {index}: intervals do not tile [0, T]")
            }
            Diagnostic::InvalidDrive(g) => write!(f, "drive strength must be finite (got {g})"),
        }
    }
}

impl From<Diagnostic> for Error {
    fn from(d: Diagnostic) -> Self {
        Error::InvalidProtocol(d.to_string())
    }
}

impl PulseSequence {
    /// Builds and validates a sequence starting at t = 0.
    pub fn new(pulses: Vec<Pulse>, total_time: f64, initial_state: InitialState) -> Result<Self> {
        let seq = Self {
            pulses,
            total_time,
            start_time: 0.0,
            initial_state,
        };
        seq.validate()?;
        Ok(seq)
    }

    pub fn with_initial_state(mut self, alpha: f64, beta: f64) -> Self {
        self.initial_state = InitialState { alpha, beta };
        self
    }

    pub fn with_start_time(mut self, start_time: f64) -> Result<Self> {
        self.start_time = start_time;
        self.validate()?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    /// Checks every structural invariant and reports the first violation.
    pub fn validate(&self) -> std::result::Result<(), Diagnostic> {
        let t_end = self.total_time;
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Diagnostic::NonPositiveDuration(t_end));
        }
        if !(self.start_time >= 0.0 && self.start_time <= t_end) {
            return Err(Diagnostic::StartOutOfRange(self.start_time));
        }
        let mut prev = self.start_time;
        for (index, p) in self.pulses.iter().enumerate() {
            if !p.time.is_finite() {
                return Err(Diagnostic::NonFinite { index });
            }
            if p.time < self.start_time || p.time > t_end {
                return Err(Diagnostic::TimeOutOfRange {
                    index,
                    time: p.time,
                });
            }
            if p.time < prev {
                return Err(Diagnostic::Unordered { index });
            }
            prev = p.time;
            match p.rotation {
                Rotation::AxisAngle { axis, angle } => {
                    if !angle.is_finite() || axis.iter().any(|a| !a.is_finite()) {
                        return Err(Diagnostic::NonFinite { index });
                    }
                    let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
                    if (norm - 1.0).abs() > STRUCTURE_TOL {
                        return Err(Diagnostic::AxisNotNormalized { index, norm });
                    }
                }
                Rotation::Matrix(m) => {
                    let defect = m.unitarity_defect();
                    if !(defect <= STRUCTURE_TOL) {
                        return Err(Diagnostic::NotUnitary { index, defect });
                    }
                }
            }
        }
        Ok(())
    }

    /// `[t_start, t_1, …, t_N, T]`: boundaries of the free-evolution windows.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut b = Vec::with_capacity(self.pulses.len() + 2);
        b.push(self.start_time);
        b.extend(self.pulses.iter().map(|p| p.time));
        b.push(self.total_time);
        b
    }

    /// Number of free-evolution windows with non-zero length.
    pub fn active_segments(&self) -> usize {
        self.boundaries().windows(2).filter(|w| w[1] > w[0]).count()
    }

    /// Shortest non-zero free-evolution window.
    pub fn min_spacing(&self) -> f64 {
        self.boundaries()
            .windows(2)
            .map(|w| w[1] - w[0])
            .filter(|d| *d > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// True when every pulse maps `Z` to `±Z` under conjugation, so the
    /// whole protocol reduces to a single signed phase on the initial state.
    pub fn is_z_preserving(&self) -> bool {
        let z = Mat2::pauli_z();
        self.pulses.iter().all(|p| {
            let u = p.rotation.unitary();
            let conj = u.dagger() * z * u;
            (conj - z).max_abs() <= 1e-10 || (conj + z).max_abs() <= 1e-10
        })
    }

    /// Sign `±1` each free window's `Z` carries after commuting all pulses to
    /// the end; only meaningful for [`is_z_preserving`](Self::is_z_preserving)
    /// sequences.
    pub fn segment_signs(&self) -> Vec<f64> {
        let z = Mat2::pauli_z();
        let mut signs = Vec::with_capacity(self.pulses.len() + 1);
        let mut s = 1.0;
        signs.push(s);
        for p in &self.pulses {
            let u = p.rotation.unitary();
            if (u.dagger() * z * u + z).max_abs() <= 1e-10 {
                s = -s;
            }
            signs.push(s);
        }
        signs
    }
}

/// Prepare `|+⟩` and evolve freely for `T`.
pub fn make_ramsey(total_time: f64) -> Result<PulseSequence> {
    positive_duration(total_time)?;
    PulseSequence::new(Vec::new(), total_time, InitialState::PLUS)
}

/// π rotations about `axis` at each of `times`.
pub fn make_pi_train(times: &[f64], axis: Axis, total_time: f64) -> Result<PulseSequence> {
    positive_duration(total_time)?;
    crate::signal::check_non_decreasing(times)?;
    if let Some(&t) = times.iter().find(|&&t| !(0.0..=total_time).contains(&t)) {
        return Err(Error::InvalidParameter(format!(
            "pulse time {t} outside [0, {total_time}]"
        )));
    }
    let pulses = times.iter().map(|&t| Pulse::about(t, axis, PI)).collect();
    PulseSequence::new(pulses, total_time, InitialState::PLUS)
}

/// π/2 X rotations every `spacing`, the last one at `T`.
pub fn make_pi2_train(spacing: f64, total_time: f64) -> Result<PulseSequence> {
    positive_duration(total_time)?;
    if !(spacing > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "spacing must be > 0, got {spacing}"
        )));
    }
    let count = (total_time / spacing).round();
    if count < 1.0 || (count * spacing - total_time).abs() > 1e-9 * total_time {
        return Err(Error::InvalidParameter(format!(
            "spacing {spacing} does not tile T = {total_time}"
        )));
    }
    let n = count as usize;
    let pulses = (1..=n)
        .map(|k| {
            let t = if k == n {
                total_time
            } else {
                k as f64 * spacing
            };
            Pulse::about(t, Axis::X, FRAC_PI_2)
        })
        .collect();
    PulseSequence::new(pulses, total_time, InitialState::PLUS)
}

/// Trotterized transverse drive: `m` free windows of `T/m`, each followed by
/// `exp(-i g X T/m)`, i.e. an X rotation of angle `2gT/m`.
///
/// With `g = π/2` and `m = T` this is the π-train at integer times; with
/// `m = 2T` it is the π/2-train with half-second spacing.
pub fn make_trotterized_gx(total_time: f64, m: usize, g: f64) -> Result<PulseSequence> {
    positive_duration(total_time)?;
    if m == 0 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }
    if !g.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "g must be finite, got {g}"
        )));
    }
    let dt = total_time / m as f64;
    let angle = 2.0 * g * dt;
    let pulses = (1..=m)
        .map(|k| {
            let t = if k == m { total_time } else { k as f64 * dt };
            Pulse::about(t, Axis::X, angle)
        })
        .collect();
    PulseSequence::new(pulses, total_time, InitialState::PLUS)
}

fn positive_duration(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "total time must be > 0, got {t}"
        )))
    }
}

/// A constant Hermitian control generator on one time window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSegment {
    pub t0: f64,
    pub t1: f64,
    pub generator: Mat2,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ControlKind {
    /// `H_c = g X` for the whole protocol.
    TransverseDrive { g: f64 },
    /// Piecewise-constant `H_c`, windows tiling `[0, T]`.
    Piecewise(Vec<GeneratorSegment>),
}

/// Continuous control Hamiltonian added to the signal coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousControl {
    pub kind: ControlKind,
    pub total_time: f64,
}

impl ContinuousControl {
    pub fn transverse_drive(g: f64, total_time: f64) -> Result<Self> {
        let c = Self {
            kind: ControlKind::TransverseDrive { g },
            total_time,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn piecewise(segments: Vec<GeneratorSegment>, total_time: f64) -> Result<Self> {
        let c = Self {
            kind: ControlKind::Piecewise(segments),
            total_time,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> std::result::Result<(), Diagnostic> {
        let t_end = self.total_time;
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Diagnostic::NonPositiveDuration(t_end));
        }
        match &self.kind {
            ControlKind::TransverseDrive { g } => {
                if !g.is_finite() {
                    return Err(Diagnostic::InvalidDrive(*g));
                }
            }
            ControlKind::Piecewise(segs) => {
                let tol = STRUCTURE_TOL * t_end.max(1.0);
                let mut cursor = 0.0;
                for (index, s) in segs.iter().enumerate() {
                    if (s.t0 - cursor).abs() > tol || s.t1 < s.t0 {
                        return Err(Diagnostic::Tiling { index });
                    }
                    let defect = s.generator.hermiticity_defect();
                    if !(defect <= STRUCTURE_TOL) {
                        return Err(Diagnostic::NotHermitian { index, defect });
                    }
                    cursor = s.t1;
                }
                if segs.is_empty() || (cursor - t_end).abs() > tol {
                    return Err(Diagnostic::Tiling { index: segs.len() });
                }
            }
        }
        Ok(())
    }

    /// Windows over which the control is constant (or smooth), with their generators.
    pub fn pieces(&self) -> Vec<GeneratorSegment> {
        match &self.kind {
            ControlKind::TransverseDrive { g } => vec![GeneratorSegment {
                t0: 0.0,
                t1: self.total_time,
                generator: Mat2::pauli_x().scale((*g).into()),
            }],
            ControlKind::Piecewise(segs) => segs.clone(),
        }
    }

    /// Largest spectral norm of the control generator (traceless part).
    pub fn max_rate(&self) -> f64 {
        self.pieces()
            .iter()
            .map(|s| {
                let (_, h) = s.generator.pauli_coefficients();
                (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;

    #[test]
    fn ramsey_constructor() {
        let s = make_ramsey(1.0).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.total_time, 1.0);
        assert_eq!(make_ramsey(8.0).unwrap().len(), 0);
        assert!(make_ramsey(0.0).is_err());
        assert!(make_ramsey(-1.0).is_err());
    }

    #[test]
    fn pi_train_constructor() {
        let s = make_pi_train(&[1.0, 2.0, 3.0, 4.0], Axis::X, 4.0).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.is_z_preserving());
        assert_eq!(s.segment_signs(), vec![1.0, -1.0, 1.0, -1.0, 1.0]);
        assert_eq!(make_pi_train(&[1.0], Axis::X, 2.0).unwrap().len(), 1);
        assert!(make_pi_train(&[], Axis::Y, 2.0).unwrap().is_empty());
        assert!(make_pi_train(&[2.0, 1.0], Axis::X, 4.0).is_err());
        assert!(make_pi_train(&[5.0], Axis::X, 4.0).is_err());
    }

    #[test]
    fn pi2_train_constructor() {
        let s = make_pi2_train(0.5, 2.0).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.pulses.last().unwrap().time, 2.0);
        assert_eq!(make_pi2_train(1.0, 4.0).unwrap().len(), 4);
        assert!(make_pi2_train(3.0, 4.0).is_err());
        assert!(!s.is_z_preserving());
    }

    #[test]
    fn trotterized_gx_constructor() {
        let g = FRAC_PI_2;
        let s = make_trotterized_gx(4.0, 8, g).unwrap();
        assert_eq!(s.len(), 8);
        assert_eq!(s.active_segments(), 8);
        for p in &s.pulses {
            match p.rotation {
                Rotation::AxisAngle { angle, .. } => assert!((angle - FRAC_PI_2).abs() < 1e-15),
                _ => unreachable!(),
            }
        }
        let s = make_trotterized_gx(4.0, 4, g).unwrap();
        let train = make_pi_train(&[1.0, 2.0, 3.0, 4.0], Axis::X, 4.0).unwrap();
        assert_eq!(s, train);
        assert!(make_trotterized_gx(4.0, 0, g).is_err());
        assert_eq!(make_trotterized_gx(3.0, 1, 0.7).unwrap().len(), 1);
    }

    #[test]
    fn validate_reports_first_problem() {
        assert!(make_ramsey(1.0).unwrap().validate().is_ok());

        let mut s = make_ramsey(1.0).unwrap();
        s.pulses.push(Pulse::about(-1.0, Axis::X, PI));
        let d = s.validate().unwrap_err();
        assert!(d.to_string().contains("time out of range"));

        let mut s = make_ramsey(1.0).unwrap();
        let bad = Mat2::identity().scale(Complex64::new(1.1, 0.0));
        s.pulses.push(Pulse::new(0.5, Rotation::Matrix(bad)));
        let d = s.validate().unwrap_err();
        assert!(d.to_string().contains("not unitary"));

        let mut s = make_ramsey(1.0).unwrap();
        s.pulses.push(Pulse::new(
            0.5,
            Rotation::AxisAngle {
                axis: [1.0, 1.0, 0.0],
                angle: 1.0,
            },
        ));
        assert!(matches!(
            s.validate(),
            Err(Diagnostic::AxisNotNormalized { .. })
        ));

        let mut s = make_ramsey(1.0).unwrap();
        s.pulses.push(Pulse::about(0.7, Axis::X, 1.0));
        s.pulses.push(Pulse::about(0.2, Axis::X, 1.0));
        assert!(matches!(
            s.validate(),
            Err(Diagnostic::Unordered { index: 1 })
        ));
    }

    #[test]
    fn pulses_at_endpoints_allowed() {
        let s = make_pi_train(&[0.0, 2.0], Axis::X, 2.0).unwrap();
        assert_eq!(s.active_segments(), 1);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn continuous_validation() {
        assert!(ContinuousControl::transverse_drive(1.0, 2.0).is_ok());
        assert!(ContinuousControl::transverse_drive(1.0, 0.0).is_err());
        let x = Mat2::pauli_x();
        let seg = |t0, t1, generator| GeneratorSegment { t0, t1, generator };
        assert!(
            ContinuousControl::piecewise(vec![seg(0.0, 1.0, x), seg(1.0, 2.0, x)], 2.0).is_ok()
        );
        // gap
        assert!(
            ContinuousControl::piecewise(vec![seg(0.0, 1.0, x), seg(1.5, 2.0, x)], 2.0).is_err()
        );
        // short
        assert!(ContinuousControl::piecewise(vec![seg(0.0, 1.0, x)], 2.0).is_err());
        // non-Hermitian
        let bad = x.scale(crate::linalg::I);
        let err = ContinuousControl::piecewise(vec![seg(0.0, 2.0, bad)], 2.0).unwrap_err();
        assert!(err.to_string().contains("Hermitian"));
    }

    #[test]
    fn arbitrary_rotations_are_unitary() {
        let r = Rotation::about([0.3, -0.4, 1.2], 2.1);
        assert!(r.unitary().unitarity_defect() < 1e-14);
        let s = PulseSequence::new(vec![Pulse::new(0.5, r)], 1.0, InitialState::PLUS).unwrap();
        assert!(s.validate().is_ok());
        assert!(!s.is_z_preserving());
    }
}
