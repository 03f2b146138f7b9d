//! Integrated QFI of an n-qubit GHZ probe grows as n², against n for
//! independent qubits.

use iqfi_lab::bounds::ghz_scaling;
use iqfi_lab::evolution::GhzProtocol;
use iqfi_lab::iqfi::{integrate_iqfi, QuadratureConfig};
use iqfi_lab::SignalParams;

fn main() -> iqfi_lab::Result<()> {
    let t = 2.0;
    let cfg = QuadratureConfig::default();
    println!(" n   K(GHZ)    n²·2πT    n·2πT");
    for n in 1..=6 {
        let k = integrate_iqfi(
            &GhzProtocol::free(n, vec![0.0, t])?,
            &SignalParams::dc(0.0),
            &cfg,
        )?;
        let (entangled, independent) = ghz_scaling(n, t, 1.0);
        println!("{n:2} {:9.3} {entangled:9.3} {independent:9.3}", k.integral);
    }
    Ok(())
}
