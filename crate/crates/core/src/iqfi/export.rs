use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use super::SweepTable;
use crate::error::Result;

pub const CSV_VERSION_LINE: &str = "# iqfi-lab v1";

/// `omega,J` rows under the versioned header.
pub fn spectrum_csv(omegas: &[f64], values: &[f64]) -> String {
    let mut out = String::new();
    out.push_str(CSV_VERSION_LINE);
    out.push_str("\nomega,J\n");
    for (w, j) in omegas.iter().zip(values) {
        let _ = writeln!(out, "{w},{j}");
    }
    out
}

/// `T,K,K_err,slope_window`; the last column holds the fitted slope on rows
/// inside the fit window and is empty elsewhere, as are K and K_err for
/// failed points.
pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = String::new();
    out.push_str(CSV_VERSION_LINE);
    out.push_str("\nT,K,K_err,slope_window\n");
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &table.rows {
        let slope = if table.in_window(r.t) {
            opt(table.slope)
        } else {
            String::new()
        };
        let _ = writeln!(out, "{},{},{},{}", r.t, opt(r.k), opt(r.k_err), slope);
    }
    out
}

/// Writes via a temporary file in the same directory and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
