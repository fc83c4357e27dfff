//! CSV assembly helpers.
//!
//! Every float goes through one formatter, lowercase scientific with 17
//! significant digits, which round-trips f64 exactly and keeps repeated
//! runs byte-identical. Lines end in a bare LF on every platform.

use std::path::Path;

use cheeger_gap::Result;

pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Joins cells into a CSV line. Cells are produced by this crate and
/// never contain commas, quotes, or newlines, so no quoting is needed.
pub fn csv_line(cells: &[String]) -> String {
    cells.join(",")
}

pub fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_the_formatter() {
        for v in [0.5857864376269033, -10.24977083952913, 1.0, 2e-300] {
            let text = fmt_float(v);
            assert_eq!(text.parse::<f64>().unwrap(), v, "{text}");
        }
    }

    #[test]
    fn formatter_is_scientific_lowercase() {
        assert_eq!(fmt_float(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_float(2.0), "2.0000000000000000e0");
    }
}
