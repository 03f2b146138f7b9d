//! Haar-averaged integrated QFI: analytic for Z-preserving sequences,
//! Monte Carlo otherwise.

use iqfi_lab::iqfi::{haar_average_iqfi, HaarConfig, QuadratureConfig};
use iqfi_lab::protocol::{make_pi_train, Axis, Pulse};
use iqfi_lab::SignalParams;

fn main() -> iqfi_lab::Result<()> {
    let cfg = QuadratureConfig::default();
    let signal = SignalParams::dc(0.0);
    let seq = make_pi_train(&[0.5, 1.5, 2.0], Axis::Y, 2.0)?;

    let exact = haar_average_iqfi(&seq, &signal, &cfg, &HaarConfig::default())?;
    println!(
        "π-train      {:?}: {:.5} (4πζ²T/3 = {:.5})",
        exact.method,
        exact.mean,
        4.0 * std::f64::consts::PI * 2.0 / 3.0
    );

    let mut tilted = seq.clone();
    tilted.pulses.insert(0, Pulse::about(0.25, Axis::X, 0.4));
    let mc = haar_average_iqfi(
        &tilted,
        &signal,
        &cfg,
        &HaarConfig {
            samples: 2048,
            ..Default::default()
        },
    )?;
    println!(
        "tilted train {:?}: {:.5} ± {:.5} from {} states",
        mc.method, mc.mean, mc.std_error, mc.samples
    );
    Ok(())
}
