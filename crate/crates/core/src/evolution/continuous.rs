use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{Protocol, SensorState, StateMeta};
use crate::error::{Error, Result};
use crate::linalg::{Mat2, ZERO};
use crate::protocol::ContinuousControl;
use crate::signal::SignalParams;

pub const DEFAULT_ODE_TOL: f64 = 1e-10;

/// `[ψ₀, ψ₁, φ₀, φ₁]`
type Aug = [Complex64; 4];

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

/// A continuous control paired with the integrator tolerance used to evolve it.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousProtocol {
    pub control: ContinuousControl,
    pub tol: f64,
}

impl ContinuousProtocol {
    pub fn new(control: ContinuousControl, tol: f64) -> Result<Self> {
        let p = Self { control, tol };
        p.check()?;
        Ok(p)
    }

    /// `H = g X + ζ B cos(ωt + φ) Z` for `[0, T]`.
    pub fn transverse_drive(g: f64, total_time: f64) -> Result<Self> {
        Self::new(
            ContinuousControl::transverse_drive(g, total_time)?,
            DEFAULT_ODE_TOL,
        )
    }
}

impl Protocol for ContinuousProtocol {
    fn check(&self) -> Result<()> {
        self.control.validate()?;
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be > 0, got {}",
                self.tol
            )));
        }
        Ok(())
    }

    fn evolve(&self, signal: &SignalParams) -> Result<SensorState> {
        integrate(&self.control, signal, self.tol)
    }

    fn total_time(&self) -> f64 {
        self.control.total_time
    }

    fn feature_frequency(&self, signal: &SignalParams) -> f64 {
        (1.0 / self.control.total_time)
            .max(2.0 * self.control.max_rate())
            .max(signal.coupling().abs())
    }
}

/// Integrates `|ψ⟩` and `∂_B|ψ⟩` under `H(t) = G(t) + ζ B cos(ωt + φ) Z`.
///
/// The augmented system
///
/// ```text
/// d/dt ψ = -i H ψ
/// d/dt φ = -i (H φ + ζ cos(ωt + φ) Z ψ)
/// ```
///
/// is advanced with classical RK4 under step-doubling error control. The
/// accepted local error per step is `tol · h / T`, so the accumulated error
/// stays near `tol`. Starts from `|+⟩`.
pub fn evolve_continuous(
    control: &ContinuousControl,
    signal: &SignalParams,
    tol: f64,
) -> Result<SensorState> {
    ContinuousProtocol {
        control: control.clone(),
        tol,
    }
    .check()?;
    integrate(control, signal, tol)
}

fn integrate(control: &ContinuousControl, signal: &SignalParams, tol: f64) -> Result<SensorState> {
    let total = control.total_time;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut y: Aug = [Complex64::new(h, 0.0), Complex64::new(h, 0.0), ZERO, ZERO];

    let mut scales = vec![total];
    if signal.omega > 0.0 {
        scales.push(TAU / signal.omega);
    }
    let rate = control.max_rate();
    if rate > 0.0 {
        scales.push(1.0 / rate);
    }
    if signal.coupling() != 0.0 {
        scales.push(1.0 / signal.coupling().abs());
    }
    let mut step = scales.iter().copied().fold(f64::INFINITY, f64::min) / 50.0;

    for piece in control.pieces() {
        if piece.t1 <= piece.t0 {
            continue;
        }
        let rhs = Rhs {
            generator: piece.generator,
            signal: *signal,
        };
        step = advance(&rhs, &mut y, piece.t0, piece.t1, step, tol, total)?;
    }

    let norm = (y[0].norm_sqr() + y[1].norm_sqr()).sqrt();
    let drift = (norm - 1.0).abs();
    let allowed = 10.0 * tol;
    if drift > allowed {
        return Err(Error::NormDrift { drift, allowed });
    }
    let inv = 1.0 / norm;
    Ok(SensorState {
        psi: [y[0] * inv, y[1] * inv],
        dpsi: [y[2] * inv, y[3] * inv],
        meta: StateMeta {
            b: signal.b,
            omega: signal.omega,
            total_time: total,
        },
    })
}

struct Rhs {
    generator: Mat2,
    signal: SignalParams,
}

impl Rhs {
    fn eval(&self, t: f64, y: &Aug) -> Aug {
        let c = self.signal.zeta * (self.signal.omega * t + self.signal.phi).cos();
        let hz = c * self.signal.b;
        let g = &self.generator;
        let h_apply = |v0: Complex64, v1: Complex64| {
            (g.a * v0 + g.b * v1 + hz * v0, g.c * v0 + g.d * v1 - hz * v1)
        };
        let (p0, p1) = h_apply(y[0], y[1]);
        let (d0, d1) = h_apply(y[2], y[3]);
        [
            MINUS_I * p0,
            MINUS_I * p1,
            MINUS_I * (d0 + c * y[0]),
            MINUS_I * (d1 - c * y[1]),
        ]
    }
}

fn axpy(y: &Aug, k: &Aug, h: f64) -> Aug {
    [
        y[0] + k[0] * h,
        y[1] + k[1] * h,
        y[2] + k[2] * h,
        y[3] + k[3] * h,
    ]
}

fn rk4(rhs: &Rhs, t: f64, y: &Aug, h: f64) -> Aug {
    let k1 = rhs.eval(t, y);
    let k2 = rhs.eval(t + 0.5 * h, &axpy(y, &k1, 0.5 * h));
    let k3 = rhs.eval(t + 0.5 * h, &axpy(y, &k2, 0.5 * h));
    let k4 = rhs.eval(t + h, &axpy(y, &k3, h));
    let mut out = *y;
    for i in 0..4 {
        out[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
    }
    out
}

/// Advances `y` from `t0` to `t1`; returns the last proposed step size.
fn advance(
    rhs: &Rhs,
    y: &mut Aug,
    t0: f64,
    t1: f64,
    mut h: f64,
    tol: f64,
    total: f64,
) -> Result<f64> {
    let mut t = t0;
    let min_step = 1e-14 * total.max(1.0);
    while t < t1 {
        let last = t + h >= t1;
        let hh = if last { t1 - t } else { h };
        let full = rk4(rhs, t, y, hh);
        let mid = rk4(rhs, t, y, 0.5 * hh);
        let two = rk4(rhs, t + 0.5 * hh, &mid, 0.5 * hh);
        let err = (0..4)
            .map(|i| (two[i] - full[i]).norm())
            .fold(0.0, f64::max)
            / 15.0;
        // below a few ulps the estimate is pure roundoff
        let allowed = (tol * hh / total).max(16.0 * f64::EPSILON);
        if err <= allowed {
            for i in 0..4 {
                y[i] = two[i] + (two[i] - full[i]) / 15.0;
            }
            t = if last { t1 } else { t + hh };
        }
        let factor = if err > 0.0 {
            0.9 * (allowed / err).powf(0.25)
        } else {
            4.0
        };
        let proposed = hh * factor.clamp(0.1, 4.0);
        // a clipped final step should not shrink the next window's start
        h = if last && err <= allowed {
            h.max(proposed)
        } else {
            proposed
        };
        if h < min_step {
            return Err(Error::StepUnderflow { t, h });
        }
    }
    Ok(h)
}
