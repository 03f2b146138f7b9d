//! Protocols as JSON documents: write one, read it back, evaluate it.

use iqfi_lab::evolution::ContinuousProtocol;
use iqfi_lab::protocol::{make_trotterized_gx, DecodedProtocol, ProtocolDocument};
use iqfi_lab::{Protocol, SignalParams};

fn main() -> iqfi_lab::Result<()> {
    let seq = make_trotterized_gx(2.0, 4, 1.2)?;
    let text = ProtocolDocument::from(&seq).to_json()?;
    println!("{text}");

    let signal = SignalParams::dc(0.5).with_omega(2.4);
    match ProtocolDocument::from_json(&text)?.decode()? {
        DecodedProtocol::Discrete(back) => {
            println!(
                "J before {:.12}, after round trip {:.12}",
                seq.qfi(&signal)?,
                back.qfi(&signal)?
            )
        }
        DecodedProtocol::Continuous(_) => unreachable!(),
    }

    let drive = r#"{ "type": "transverse_drive", "T": 3.0, "g": 1.5707963267948966 }"#;
    if let DecodedProtocol::Continuous(c) = ProtocolDocument::from_json(drive)?.decode()? {
        let p = ContinuousProtocol::new(c, 1e-10)?;
        println!(
            "transverse drive J at ω = π: {:.6}",
            p.qfi(&signal.with_omega(std::f64::consts::PI))?
        );
    }
    Ok(())
}
