//! Dense 2×2 complex linear algebra for single-qubit propagators.
//!
//! Everything here is closed-form: exponentials of Hermitian 2×2 matrices go
//! through the Pauli decomposition `H = h₀ I + h·σ`, so no iterative routine
//! is ever needed.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Two-component state vector `[⟨0|ψ⟩, ⟨1|ψ⟩]`.
pub type Ket = [Complex64; 2];

/// Row-major 2×2 complex matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mat2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn pauli_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub const fn pauli_y() -> Self {
        Self::new(ZERO, Complex64::new(0.0, -1.0), I, ZERO)
    }

    pub const fn pauli_z() -> Self {
        Self::new(ONE, ZERO, ZERO, Complex64::new(-1.0, 0.0))
    }

    /// `h₀ I + hx X + hy Y + hz Z` for real coefficients.
    pub fn from_pauli(h0: f64, h: [f64; 3]) -> Self {
        Self::new(
            Complex64::new(h0 + h[2], 0.0),
            Complex64::new(h[0], -h[1]),
            Complex64::new(h[0], h[1]),
            Complex64::new(h0 - h[2], 0.0),
        )
    }

    pub fn dagger(&self) -> Self {
        Self::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn apply(&self, v: &Ket) -> Ket {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    /// Largest entry modulus; a cheap matrix norm for tolerance checks.
    pub fn max_abs(&self) -> f64 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `‖U†U − I‖` in the max-entry norm.
    pub fn unitarity_defect(&self) -> f64 {
        (self.dagger() * *self - Self::identity()).max_abs()
    }

    /// `‖H − H†‖` in the max-entry norm.
    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.dagger()).max_abs()
    }

    /// Real Pauli coefficients `(h₀, [hx, hy, hz])` of the Hermitian part.
    pub fn pauli_coefficients(&self) -> (f64, [f64; 3]) {
        let h0 = 0.5 * (self.a.re + self.d.re);
        let hz = 0.5 * (self.a.re - self.d.re);
        let off = 0.5 * (self.c + self.b.conj());
        (h0, [off.re, off.im, hz])
    }

    /// `exp(-i H t)` for Hermitian `H`.
    pub fn hermitian_propagator(&self, t: f64) -> Self {
        let (h0, h) = self.pauli_coefficients();
        let norm = (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt();
        let phase = Complex64::from_polar(1.0, -h0 * t);
        rotation_from_generator(norm * t, h, norm).scale(phase)
    }
}

/// `cos(θ) I − i sin(θ) n̂·σ` where `n̂ = h / norm`; `θ` is `norm · t`.
fn rotation_from_generator(theta: f64, h: [f64; 3], norm: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    // sin(θ)/norm, stable as norm → 0
    let k = if norm > 0.0 { s / norm } else { 0.0 };
    let (nx, ny, nz) = (h[0] * k, h[1] * k, h[2] * k);
    Mat2::new(
        Complex64::new(c, -nz),
        Complex64::new(-ny, -nx),
        Complex64::new(ny, -nx),
        Complex64::new(c, nz),
    )
}

/// SU(2) rotation `exp(-i angle/2 · n̂·σ)` about a unit axis.
pub fn rotation(axis: [f64; 3], angle: f64) -> Mat2 {
    let half = 0.5 * angle;
    rotation_from_generator(half, axis, 1.0)
}

/// `exp(-i φ Z)`, the free-evolution propagator with accumulated phase `φ`.
pub fn z_phase(phi: f64) -> Mat2 {
    let e = Complex64::from_polar(1.0, -phi);
    Mat2::new(e, ZERO, ZERO, e.conj())
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, r: Mat2) -> Mat2 {
        Mat2::new(
            self.a * r.a + self.b * r.c,
            self.a * r.b + self.b * r.d,
            self.c * r.a + self.d * r.c,
            self.c * r.b + self.d * r.d,
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, r: Mat2) -> Mat2 {
        Mat2::new(self.a + r.a, self.b + r.b, self.c + r.c, self.d + r.d)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, r: Mat2) -> Mat2 {
        Mat2::new(self.a - r.a, self.b - r.b, self.c - r.c, self.d - r.d)
    }
}

/// `⟨u|v⟩`
pub fn inner(u: &Ket, v: &Ket) -> Complex64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

pub fn norm_sqr(v: &Ket) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr()
}

pub fn scale(v: &Ket, s: Complex64) -> Ket {
    [v[0] * s, v[1] * s]
}

pub fn add(u: &Ket, v: &Ket) -> Ket {
    [u[0] + v[0], u[1] + v[1]]
}

/// `Z|v⟩`
pub fn apply_z(v: &Ket) -> Ket {
    [v[0], -v[1]]
}

/// Bloch-sphere state `cos(α/2)|0⟩ + e^{iβ} sin(α/2)|1⟩`.
pub fn bloch_ket(alpha: f64, beta: f64) -> Ket {
    let (s, c) = (0.5 * alpha).sin_cos();
    [Complex64::new(c, 0.0), Complex64::from_polar(s, beta)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (*a - *b).max_abs() <= tol
    }

    /// Truncated Taylor series, used only as an independent check.
    fn expm_series(m: &Mat2) -> Mat2 {
        let mut term = Mat2::identity();
        let mut sum = Mat2::identity();
        for k in 1..60 {
            term = (term * *m).scale(Complex64::new(1.0 / k as f64, 0.0));
            sum = sum + term;
        }
        sum
    }

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (Mat2::pauli_x(), Mat2::pauli_y(), Mat2::pauli_z());
        assert!(close(&(x * y), &z.scale(I), 1e-15));
        assert!(close(&(x * x), &Mat2::identity(), 0.0));
        assert!(close(&(x * z * x), &z.scale(-ONE), 0.0));
    }

    #[test]
    fn propagator_matches_series() {
        let h = Mat2::from_pauli(0.3, [0.7, -1.1, 0.4]);
        let t = 1.7;
        let direct = h.hermitian_propagator(t);
        let series = expm_series(&h.scale(Complex64::new(0.0, -t)));
        assert!(close(&direct, &series, 1e-13));
        assert!(direct.unitarity_defect() < 1e-14);
    }

    #[test]
    fn rotation_pi_about_x_is_minus_i_x() {
        let r = rotation([1.0, 0.0, 0.0], std::f64::consts::PI);
        assert!(close(&r, &Mat2::pauli_x().scale(-I), 1e-15));
    }

    #[test]
    fn z_phase_matches_generator() {
        let a = z_phase(0.37);
        let b = Mat2::pauli_z().hermitian_propagator(0.37);
        assert!(close(&a, &b, 1e-15));
    }

    #[test]
    fn pauli_round_trip() {
        let m = Mat2::from_pauli(-0.2, [1.0, 2.0, 3.0]);
        let (h0, h) = m.pauli_coefficients();
        assert!((h0 + 0.2).abs() < 1e-15);
        assert_eq!(h, [1.0, 2.0, 3.0]);
        assert!(m.hermiticity_defect() == 0.0);
    }
}
