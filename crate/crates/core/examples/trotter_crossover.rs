//! K(T) of the Trotterized drive (m = 2T steps, g = π/2): linear at zero
//! field, quadratic once ζBT is large. Prints log-log slopes.

use std::f64::consts::FRAC_PI_2;

use iqfi_lab::iqfi::{sweep_iqfi_vs_t, QuadratureConfig};
use iqfi_lab::protocol::make_trotterized_gx;
use iqfi_lab::SignalParams;

fn main() -> iqfi_lab::Result<()> {
    let cfg = QuadratureConfig::default();
    let ts: Vec<f64> = (1..=8).map(|k| 4.0 * k as f64).collect();
    let family = |t: f64| make_trotterized_gx(t, (2.0 * t).round() as usize, FRAC_PI_2);
    for zb in [0.0, 0.1, 1.0] {
        let table = sweep_iqfi_vs_t(family, &ts, &SignalParams::dc(zb), &cfg, Some((8.0, 32.0)))?;
        print!("ζB = {zb:<4}");
        for row in &table.rows {
            print!(" {:8.1}", row.k.unwrap_or(f64::NAN));
        }
        println!("  slope {:.3}", table.slope.unwrap_or(f64::NAN));
    }
    Ok(())
}
