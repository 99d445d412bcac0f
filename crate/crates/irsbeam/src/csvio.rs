//! CSV emission helpers: RFC-4180 rows, UTF-8, LF line endings.
//!
//! All float columns are printed with 10 significant digits in scientific
//! notation so that output bytes are reproducible across platforms.

use std::io::Write;

/// Formats a float with exactly 10 significant digits.
pub(crate) fn sig10(x: f64) -> String {
    if x == 0.0 {
        // Normalize -0.0 so output bytes never depend on sign of zero.
        return "0.000000000e0".to_string();
    }
    format!("{:.9e}", x)
}

/// Writes one CSV record terminated by LF. Fields are written verbatim;
/// callers only pass numeric strings and fixed tags, which never need
/// quoting under RFC 4180.
pub(crate) fn write_record<W: Write>(w: &mut W, fields: &[&str]) -> std::io::Result<()> {
    let mut first = true;
    for f in fields {
        debug_assert!(!f.contains([',', '"', '\n', '\r']));
        if !first {
            w.write_all(b",")?;
        }
        w.write_all(f.as_bytes())?;
        first = false;
    }
    w.write_all(b"\n")
}
