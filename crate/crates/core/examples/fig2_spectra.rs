//! Spectra of Ramsey, π-train, π/2-train and the continuous drive at T = 4,
//! written as CSV files under `target/fig2_spectra/`.

use std::f64::consts::FRAC_PI_2;

use iqfi_lab::evolution::ContinuousProtocol;
use iqfi_lab::iqfi::{linear_grid, qfi_on_grid, spectrum_csv, write_atomic};
use iqfi_lab::protocol::{make_pi2_train, make_pi_train, make_ramsey, Axis};
use iqfi_lab::{Protocol, SignalParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = 4.0;
    let dir = std::path::Path::new("target/fig2_spectra");
    std::fs::create_dir_all(dir)?;
    let omegas = linear_grid(0.0, 10.0, 401)?;
    let signal = SignalParams::dc(1.0);

    let protocols: Vec<(&str, Box<dyn Protocol>)> = vec![
        ("ramsey", Box::new(make_ramsey(t)?)),
        (
            "pi-train",
            Box::new(make_pi_train(&[1.0, 2.0, 3.0, 4.0], Axis::X, t)?),
        ),
        ("pi2-train", Box::new(make_pi2_train(0.5, t)?)),
        (
            "gx",
            Box::new(ContinuousProtocol::transverse_drive(FRAC_PI_2, t)?),
        ),
    ];
    for (name, p) in &protocols {
        let values = qfi_on_grid(p.as_ref(), &signal, &omegas)?;
        let (i, peak) =
            values
                .iter()
                .enumerate()
                .fold((0, f64::MIN), |a, (i, &v)| if v > a.1 { (i, v) } else { a });
        let path = dir.join(format!("{name}.csv"));
        write_atomic(&path, &spectrum_csv(&omegas, &values))?;
        println!(
            "{name:9}  peak J = {peak:7.3} at ω = {:.3}  -> {}",
            omegas[i],
            path.display()
        );
    }
    Ok(())
}
