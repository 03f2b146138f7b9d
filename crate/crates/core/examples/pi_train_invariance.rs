//! The integrated QFI of a π-pulse train does not depend on where the pulses sit.

use iqfi_lab::iqfi::{integrate_iqfi, QuadratureConfig};
use iqfi_lab::protocol::{make_pi_train, Axis};
use iqfi_lab::SignalParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> iqfi_lab::Result<()> {
    let t = 3.0;
    let cfg = QuadratureConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let reference = 2.0 * std::f64::consts::PI * t;
    println!("reference 2πζ²T = {reference:.5}");
    for _ in 0..8 {
        let n = rng.random_range(1..12usize);
        let mut times: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..t - 0.05)).collect();
        times.sort_by(f64::total_cmp);
        times.dedup_by(|a, b| (*a - *b).abs() < 0.05);
        let seq = make_pi_train(&times, Axis::X, t)?;
        let k = integrate_iqfi(&seq, &SignalParams::dc(0.0), &cfg)?;
        println!(
            "  {:2} pulses  K = {:.5}  rel. diff {:+.1e}",
            times.len(),
            k.integral,
            k.integral / reference - 1.0
        );
    }
    Ok(())
}
