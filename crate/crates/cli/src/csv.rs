//! CSV emission for the benchmark tables.
//!
//! Real values are written in scientific notation with nine significant
//! digits, decimal points only, and the final row is newline-terminated;
//! identical inputs yield byte-identical files.

use std::io::{self, Write};

use crate::harness::RmseTable;

/// Nine-significant-digit scientific form, locale independent.
pub fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

pub const RMSE_HEADER: &str =
    "method,M,snr_in_db,snr_broadband_db,trials,rmse_s,crlb_std_s,mean_error_s";

pub fn write_rmse_csv<W: Write>(out: &mut W, table: &RmseTable) -> io::Result<()> {
    writeln!(out, "{RMSE_HEADER}")?;
    for row in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.method,
            row.num_elements,
            sci(row.snr_in_db),
            sci(row.snr_broadband_db),
            row.trials,
            sci(row.rmse_s),
            sci(row.crlb_std_s),
            sci(row.mean_error_s),
        )?;
    }
    Ok(())
}

pub const CRLB_HEADER: &str = "snr_in_db,snr_broadband_db,crlb_std_s";

/// Rows of `(snr_in_db, snr_broadband_db, crlb_std_s)`.
pub fn write_crlb_csv<W: Write>(out: &mut W, rows: &[(f64, f64, f64)]) -> io::Result<()> {
    writeln!(out, "{CRLB_HEADER}")?;
    for &(snr_in, snr_bb, std_s) in rows {
        writeln!(out, "{},{},{}", sci(snr_in), sci(snr_bb), sci(std_s))?;
    }
    Ok(())
}
