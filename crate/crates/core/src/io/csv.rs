//! CSV output: comma separated, `.` decimals, LF line endings, header first.

use std::fmt::Write as _;

use crate::analysis::Spectrum;

/// Formats `v` with 9 significant digits, trimming trailing zeros.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.8e}")
    }
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// A labelled row of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub label: String,
    pub values: Vec<f64>,
}

impl CsvRow {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        CsvRow {
            label: label.into(),
            values,
        }
    }
}

/// Renders `header` then one line per row. Rows must have `header.len() - 1` values.
pub fn write_csv(header: &[&str], rows: &[CsvRow]) -> crate::Result<String> {
    let width = header.len().saturating_sub(1);
    let mut out = String::new();
    out.push_str(&header.iter().map(|h| quote(h)).collect::<Vec<_>>().join(","));
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        if row.values.len() != width {
            return Err(crate::PidsError::Domain(format!(
                "csv row {i} has {} values, header expects {width}",
                row.values.len()
            )));
        }
        out.push_str(&quote(&row.label));
        for v in &row.values {
            let _ = write!(out, ",{}", format_number(*v));
        }
        out.push('\n');
    }
    Ok(out)
}

pub const SPECTRUM_HEADER: [&str; 4] = ["bin", "frequency_hz", "magnitude_db", "power"];

pub fn spectrum_rows(spec: &Spectrum) -> Vec<CsvRow> {
    spec.bin_hz
        .iter()
        .zip(&spec.magnitude_db)
        .zip(&spec.linear_power)
        .enumerate()
        .map(|(k, ((&f, &db), &p))| CsvRow::new(k.to_string(), vec![f, db, p]))
        .collect()
}

pub fn spectrum_csv(spec: &Spectrum) -> String {
    write_csv(&SPECTRUM_HEADER, &spectrum_rows(spec)).expect("spectrum rows are rectangular")
}
