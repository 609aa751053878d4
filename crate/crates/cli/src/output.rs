//! Human-readable formatting. Machine formats use full precision elsewhere.

use std::fmt::Write;

pub use beam_nf::physical::sig6;

/// Full-precision CSV field.
#[must_use]
pub fn csv_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Right-aligned columns with a header row.
#[must_use]
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut s = String::new();
    let line = |s: &mut String, cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells.zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(s, "{}", parts.join("  "));
    };
    line(&mut s, &mut header.iter().copied());
    for r in rows {
        line(&mut s, &mut r.iter().map(String::as_str));
    }
    s
}

/// `key  value` lines.
#[must_use]
pub fn key_values(rows: &[(&str, String)]) -> String {
    let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().fold(String::new(), |mut s, (k, v)| {
        let _ = writeln!(s, "{k:<w$}  {v}");
        s
    })
}

/// `key,value` CSV.
#[must_use]
pub fn key_values_csv(rows: &[(&str, String)]) -> String {
    rows.iter().fold(String::from("key,value\n"), |mut s, (k, v)| {
        let _ = writeln!(s, "{k},{v}");
        s
    })
}
