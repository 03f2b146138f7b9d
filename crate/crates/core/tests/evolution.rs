mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use iqfi_lab::evolution::{
    evolve_continuous, evolve_discrete, evolve_ghz, qfi, qfi_fd_oracle, ContinuousProtocol,
    GhzProtocol,
};
use iqfi_lab::iqfi::{integrate_iqfi, QuadratureConfig};
use iqfi_lab::linalg::{self, rotation, Mat2};
use iqfi_lab::protocol::{
    make_pi2_train, make_pi_train, make_ramsey, make_trotterized_gx, Axis, ContinuousControl,
    GeneratorSegment,
};
use iqfi_lab::{Protocol, SignalParams};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use common::{brute_force_ghz_qfi, random_protocol, rng, spaced_times};

fn sig(b: f64, omega: f64) -> SignalParams {
    SignalParams::new(b, omega, 0.0, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn state_invariants(seed in any::<u64>(), pulses in 0usize..16, t in 0.2..10.0f64,
                        b in -3.0..3.0f64, omega in 0.0..30.0f64, phi in 0.0..6.28f64) {
        let mut r = rng(seed);
        let seq = random_protocol(&mut r, pulses, t);
        let s = SignalParams::new(b, omega, phi, 1.3).unwrap();
        let st = evolve_discrete(&seq, &s).unwrap();
        prop_assert!((st.norm() - 1.0).abs() < 1e-10);
        prop_assert!(st.overlap().re.abs() < 1e-10 * st.derivative_norm_sqr().sqrt().max(1.0));
        let j = qfi(&st);
        prop_assert!(j >= 0.0);
        prop_assert!(j <= 4.0 * st.derivative_norm_sqr() * (1.0 + 1e-12));
    }

    #[test]
    fn pi_train_matches_closed_form(seed in any::<u64>(), n in 1usize..12, t in 0.5..8.0f64,
                                    alpha in 0.0..PI, beta in 0.0..6.28f64, omega in 0.0..20.0f64,
                                    b in -2.0..2.0f64) {
        let mut r = rng(seed);
        let mut times = spaced_times(&mut r, n - 1, t, 3.0);
        times.push(t);
        let seq = make_pi_train(&times, Axis::X, t).unwrap().with_initial_state(alpha, beta);
        let s = SignalParams::new(b, omega, 0.0, 0.8).unwrap();
        let direct = qfi(&evolve_discrete(&seq, &s).unwrap());
        // boundaries t₀ = 0, t₁ … t_N = T
        let mut bnd = vec![0.0];
        bnd.extend_from_slice(&times);
        let nn = bnd.len() - 1;
        let closed = if omega == 0.0 {
            let signed: f64 = bnd.windows(2).enumerate().map(|(i, w)| (w[1] - w[0]) * if i % 2 == 0 { 1.0 } else { -1.0 }).sum();
            4.0 * 0.64 * alpha.sin().powi(2) * signed * signed
        } else {
            let mut sum = (omega * bnd[0]).sin();
            for (i, &ti) in bnd.iter().enumerate().take(nn).skip(1) {
                sum += 2.0 * (-1f64).powi(i as i32) * (omega * ti).sin();
            }
            sum += (-1f64).powi(nn as i32) * (omega * bnd[nn]).sin();
            4.0 * 0.64 * alpha.sin().powi(2) / (omega * omega) * sum * sum
        };
        prop_assert!((direct - closed).abs() <= 1e-9 * closed.max(1.0), "{} vs {}", direct, closed);
        let lib = iqfi_lab::bounds::pi_train_spectrum(&bnd, alpha, &s);
        prop_assert!((lib - closed).abs() <= 1e-9 * closed.max(1.0));
    }
}

#[test]
fn pi_train_conjugation_identity() {
    // pulses pushed to the end: Xᴺ exp(-iζB Σ(−1)ⁿΘₙ Z)|ψ₀⟩, with X π-pulse = −iX
    let mut r = rng(11);
    for _ in 0..20 {
        let n = r.random_range(1..10usize);
        let t = r.random_range(1.0..6.0);
        let times = spaced_times(&mut r, n, t, 2.0);
        let (alpha, beta) = (r.random_range(0.0..PI), r.random_range(0.0..2.0 * PI));
        let seq = make_pi_train(&times, Axis::X, t)
            .unwrap()
            .with_initial_state(alpha, beta);
        let s = SignalParams::new(0.7, r.random_range(0.0..10.0), 0.0, 1.1).unwrap();
        let direct = evolve_discrete(&seq, &s).unwrap().psi;

        let mut bnd = vec![0.0];
        bnd.extend_from_slice(&times);
        bnd.push(t);
        let phase: f64 = bnd
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let th = ((s.omega * w[1]).sin() - (s.omega * w[0]).sin()) / s.omega;
                if i % 2 == 0 {
                    th
                } else {
                    -th
                }
            })
            .sum();
        let mut v = linalg::z_phase(s.zeta * s.b * phase).apply(&linalg::bloch_ket(alpha, beta));
        for _ in 0..n {
            v = Mat2::pauli_x().scale(Complex64::new(0.0, -1.0)).apply(&v);
        }
        assert!((direct[0] - v[0]).norm() < 1e-12 && (direct[1] - v[1]).norm() < 1e-12);
    }
}

#[test]
fn named_protocol_equivalences() {
    let g = FRAC_PI_2;
    for omega in [0.0, 0.4, 1.7, PI, 7.0] {
        let s = sig(0.9, omega);
        // m = T at g = π/2 is the integer-time π-train
        let a = qfi(&evolve_discrete(&make_trotterized_gx(4.0, 4, g).unwrap(), &s).unwrap());
        let b = qfi(&evolve_discrete(
            &make_pi_train(&[1.0, 2.0, 3.0, 4.0], Axis::X, 4.0).unwrap(),
            &s,
        )
        .unwrap());
        assert!((a - b).abs() < 1e-12 * b.max(1.0));
        // m = 2T is the half-second π/2-train
        let a = qfi(&evolve_discrete(&make_trotterized_gx(3.0, 6, g).unwrap(), &s).unwrap());
        let b = qfi(&evolve_discrete(&make_pi2_train(0.5, 3.0).unwrap(), &s).unwrap());
        assert!((a - b).abs() < 1e-12 * b.max(1.0));
    }
    // m = 1: one window then one rotation; the IQFI is Ramsey's
    let cfg = QuadratureConfig::default();
    let k1 = integrate_iqfi(
        &make_trotterized_gx(3.0, 1, 0.8).unwrap(),
        &sig(0.5, 0.0),
        &cfg,
    )
    .unwrap();
    let k0 = integrate_iqfi(&make_ramsey(3.0).unwrap(), &sig(0.5, 0.0), &cfg).unwrap();
    assert!((k1.integral - k0.integral).abs() < 1e-3 * k0.integral);
}

#[test]
fn continuous_matches_finite_differences() {
    let p = ContinuousProtocol::new(
        ContinuousControl::transverse_drive(FRAC_PI_2, 4.0).unwrap(),
        1e-12,
    )
    .unwrap();
    for omega in [0.0, 1.0, PI, 5.0] {
        let s = sig(0.8, omega);
        let an = p.qfi(&s).unwrap();
        // a larger step keeps integrator noise out of the difference quotient
        let fd = qfi_fd_oracle(&p, &s, 1e-3).unwrap();
        assert!(
            (an - fd).abs() <= 1e-5 * an.max(1e-2),
            "ω={omega}: {an} vs {fd}"
        );
    }
}

#[test]
fn trotter_limit_is_continuous_drive() {
    let (g, t) = (1.1, 5.0);
    let cont = evolve_continuous(
        &ContinuousControl::transverse_drive(g, t).unwrap(),
        &sig(0.6, 0.0),
        1e-12,
    );
    assert!(cont.is_ok());
    for omega in [0.3, 2.2, 4.0] {
        let s = sig(0.6, omega);
        let c = qfi(&evolve_continuous(
            &ContinuousControl::transverse_drive(g, t).unwrap(),
            &s,
            1e-12,
        )
        .unwrap());
        let d = qfi(&evolve_discrete(&make_trotterized_gx(t, 1024, g).unwrap(), &s).unwrap());
        assert!((c - d).abs() <= 1e-4 * c, "ω={omega}: {c} vs {d}");
    }
}

#[test]
fn piecewise_control_matches_pulses() {
    // a short strong X segment approximates an instantaneous π pulse; with
    // zero duration windows around it the piecewise path must agree closely
    let eps = 1e-4;
    let strength = FRAC_PI_2 / eps;
    let segs = vec![
        GeneratorSegment {
            t0: 0.0,
            t1: 1.0,
            generator: Mat2::from_pauli(0.0, [0.0; 3]),
        },
        GeneratorSegment {
            t0: 1.0,
            t1: 1.0 + eps,
            generator: Mat2::from_pauli(0.0, [strength, 0.0, 0.0]),
        },
        GeneratorSegment {
            t0: 1.0 + eps,
            t1: 2.0 + eps,
            generator: Mat2::from_pauli(0.0, [0.0; 3]),
        },
    ];
    let c = ContinuousControl::piecewise(segs, 2.0 + eps).unwrap();
    let echo = make_pi_train(&[1.0], Axis::X, 2.0).unwrap();
    for omega in [0.5, 1.5] {
        let a = qfi(&evolve_continuous(&c, &sig(0.2, omega), 1e-11).unwrap());
        let b = qfi(&evolve_discrete(&echo, &sig(0.2, omega)).unwrap());
        assert!((a - b).abs() < 1e-3 * b.max(1.0), "{a} vs {b}");
    }
}

#[test]
fn ghz_reduction_matches_tensor_oracle() {
    let mut r = rng(12);
    for n in 1..=4usize {
        for _ in 0..5 {
            let t = r.random_range(1.0..5.0);
            let k = r.random_range(0..5usize);
            let times = spaced_times(&mut r, k, t, 2.0);
            let axes: Vec<Axis> = (0..k)
                .map(|_| [Axis::X, Axis::Y, Axis::Z][r.random_range(0..3)])
                .collect();
            let pulses: Vec<_> = times
                .iter()
                .zip(&axes)
                .map(|(&ti, &a)| iqfi_lab::protocol::Pulse::about(ti, a, PI))
                .collect();
            let seq = iqfi_lab::protocol::PulseSequence::new(
                pulses,
                t,
                iqfi_lab::protocol::InitialState::PLUS,
            )
            .unwrap();
            let ghz = GhzProtocol::from_sequence(n, &seq).unwrap();
            let mats: Vec<Mat2> = axes.iter().map(|a| rotation(a.unit(), PI)).collect();
            let mut bnd = vec![0.0];
            bnd.extend_from_slice(&times);
            bnd.push(t);
            for omega in [0.0, 0.9, 3.3] {
                let s = SignalParams::new(0.4, omega, 0.0, 1.0).unwrap();
                let reduced = evolve_ghz(&ghz, &s).unwrap().qfi();
                let full = brute_force_ghz_qfi(n, &bnd, &mats, 0.4, omega, 1.0);
                assert!(
                    (reduced - full).abs() < 1e-10 * full.max(1.0),
                    "n={n} ω={omega}: {reduced} vs {full}"
                );
            }
        }
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let mut seq = make_ramsey(1.0).unwrap();
    seq.pulses
        .push(iqfi_lab::protocol::Pulse::about(2.0, Axis::X, PI));
    assert!(evolve_discrete(&seq, &sig(0.0, 0.0)).is_err());
    assert!(
        ContinuousProtocol::new(ContinuousControl::transverse_drive(1.0, 1.0).unwrap(), -1.0)
            .is_err()
    );
    assert!(GhzProtocol::free(2, vec![0.0]).is_err());
}
