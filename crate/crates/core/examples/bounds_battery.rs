//! Runs the randomized bound battery and prints the tightest margins.

use iqfi_lab::bounds::{battery, BatteryConfig};

fn main() -> iqfi_lab::Result<()> {
    let mut reports = battery(&BatteryConfig::default())?;
    let failed = reports.iter().filter(|r| !r.satisfied).count();
    println!("{} checks, {failed} violated", reports.len());
    reports.sort_by(|a, b| a.margin.total_cmp(&b.margin));
    for r in reports.iter().take(10) {
        println!(
            "  {:28} measured {:10.4}  reference {:10.4}  margin {:+.2e}",
            r.name, r.measured, r.bound_or_reference, r.margin
        );
    }
    Ok(())
}
