//! Ramsey QFI spectrum and its integral for a few signal phases.
//!
//! ```text
//! cargo run --release --example ramsey_iqfi
//! ```

use std::f64::consts::PI;

use iqfi_lab::bounds::ramsey_closed_form;
use iqfi_lab::iqfi::{integrate_iqfi, QuadratureConfig};
use iqfi_lab::protocol::make_ramsey;
use iqfi_lab::{Protocol, SignalParams};

fn main() -> iqfi_lab::Result<()> {
    let t = 4.0;
    let seq = make_ramsey(t)?;
    let cfg = QuadratureConfig::default();

    println!("J(B|ω) at B = 0, φ = 0");
    for omega in [0.0, 0.5, 1.0, PI / t, 2.0, 5.0] {
        let j = seq.qfi(&SignalParams::dc(0.0).with_omega(omega))?;
        println!("  ω = {omega:6.3}  J = {j:9.4}");
    }

    println!("\nK(T = {t}) against 2ζ²T(π − ln4·sin2φ)");
    for phi in [0.0, PI / 4.0, 0.75 * PI] {
        let k = integrate_iqfi(&seq, &SignalParams::dc(0.0).with_phi(phi), &cfg)?;
        println!(
            "  φ = {phi:5.3}  K = {:9.5} ± {:.1e}  closed form {:9.5}  ({} panels)",
            k.integral,
            k.error_estimate,
            ramsey_closed_form(t, phi, 1.0),
            k.panels
        );
    }
    Ok(())
}
