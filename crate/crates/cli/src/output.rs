//! Deterministic CSV and JSON writers.
//!
//! Floats print as 17-significant-digit scientific notation so repeated
//! runs produce byte-identical files and values round-trip exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};

/// 17 significant digits, scientific.
pub fn fmt_float(v: f64) -> String {
    format!("{:.16e}", v)
}

/// One CSV file: header row, comma separator, `\n` line endings.
pub fn write_csv(path: &Path, headers: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out =
        BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    writeln!(out, "{}", headers.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Pretty JSON with a trailing newline. `serde_json` maps are ordered, so
/// output is deterministic.
pub fn write_json<S: serde::Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut out =
        BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Log-spaced grid from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    anyhow::ensure!(lo > 0.0 && hi > lo, "log grid needs 0 < lo < hi");
    anyhow::ensure!(points >= 2, "log grid needs at least 2 points");
    let (llo, lhi) = (lo.log10(), hi.log10());
    Ok((0..points)
        .map(|i| 10f64.powf(llo + (lhi - llo) * i as f64 / (points - 1) as f64))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_fixed_width_scientific() {
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_float(6.117104e-8), "6.1171039999999998e-8");
        // 17 significant digits round-trip exactly
        let v = 0.1 + 0.2;
        assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1.0, 1e3, 4).unwrap();
        assert_eq!(g.len(), 4);
        assert!((g[0] - 1.0).abs() < 1e-12);
        assert!((g[3] - 1e3).abs() < 1e-9);
        assert!(log_grid(0.0, 1.0, 4).is_err());
    }
}
