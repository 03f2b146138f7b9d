//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use iqfi_lab::linalg::{rotation, Mat2};
use iqfi_lab::protocol::{InitialState, Pulse, PulseSequence, Rotation};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` sorted times in `(0, t)`, every gap (including to 0 and `t`)
/// at least `t / (gap_div · (count + 1))`.
pub fn spaced_times(rng: &mut impl Rng, count: usize, t: f64, gap_div: f64) -> Vec<f64> {
    let gap = t / (gap_div * (count + 1) as f64);
    let room = t - gap * (count + 1) as f64;
    let mut u: Vec<f64> = (0..count).map(|_| rng.random::<f64>() * room).collect();
    u.sort_by(|a, b| a.partial_cmp(b).unwrap());
    u.into_iter()
        .enumerate()
        .map(|(i, x)| x + gap * (i + 1) as f64)
        .collect()
}

pub fn random_axis(rng: &mut impl Rng) -> [f64; 3] {
    let z = 2.0 * rng.random::<f64>() - 1.0;
    let a = 2.0 * PI * rng.random::<f64>();
    let r = (1.0 - z * z).sqrt();
    [r * a.cos(), r * a.sin(), z]
}

/// Arbitrary SU(2) pulses at spaced times, random initial state.
pub fn random_protocol(rng: &mut impl Rng, pulses: usize, t: f64) -> PulseSequence {
    let times = spaced_times(rng, pulses, t, 4.0);
    let list = times
        .into_iter()
        .map(|time| {
            let axis = random_axis(rng);
            let angle = 2.0 * PI * rng.random::<f64>();
            if rng.random_bool(0.5) {
                Pulse::new(time, Rotation::about(axis, angle))
            } else {
                Pulse::new(time, Rotation::Matrix(rotation(axis, angle)))
            }
        })
        .collect();
    let alpha = (2.0 * rng.random::<f64>() - 1.0).acos();
    let beta = 2.0 * PI * rng.random::<f64>();
    PulseSequence::new(list, t, InitialState { alpha, beta }).unwrap()
}

/// Tensor-product simulation of `n` qubits starting in GHZ, with the same
/// single-qubit unitary applied to every qubit at each pulse.
///
/// Returns the QFI from the exact derivative of the full `2ⁿ` state.
pub fn brute_force_ghz_qfi(
    n: usize,
    boundaries: &[f64],
    pulses: &[Mat2],
    b: f64,
    omega: f64,
    zeta: f64,
) -> f64 {
    let dim = 1usize << n;
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    psi[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    psi[dim - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut dpsi = vec![Complex64::new(0.0, 0.0); dim];
    // Σ_k Z_k on basis state |s⟩: n - 2·popcount(s)
    let zsum: Vec<f64> = (0..dim)
        .map(|s| n as f64 - 2.0 * (s as u32).count_ones() as f64)
        .collect();
    for (k, w) in boundaries.windows(2).enumerate() {
        // direct Θ, no small-ω care needed away from ω = 0
        let th = if omega == 0.0 {
            w[1] - w[0]
        } else {
            ((omega * w[1]).sin() - (omega * w[0]).sin()) / omega
        };
        for s in 0..dim {
            let e = Complex64::from_polar(1.0, -zeta * b * th * zsum[s]);
            psi[s] *= e;
            dpsi[s] = dpsi[s] * e + Complex64::new(0.0, -zeta * th * zsum[s]) * psi[s];
        }
        if let Some(u) = pulses.get(k) {
            for q in 0..n {
                apply_one(&mut psi, u, q);
                apply_one(&mut dpsi, u, q);
            }
        }
    }
    let dd: f64 = dpsi.iter().map(|c| c.norm_sqr()).sum();
    let ov: Complex64 = dpsi.iter().zip(&psi).map(|(d, p)| d.conj() * p).sum();
    4.0 * (dd - ov.norm_sqr())
}

fn apply_one(v: &mut [Complex64], u: &Mat2, q: usize) {
    let bit = 1usize << q;
    for s in 0..v.len() {
        if s & bit == 0 {
            let (a, b) = (v[s], v[s | bit]);
            v[s] = u.a * a + u.b * b;
            v[s | bit] = u.c * a + u.d * b;
        }
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
