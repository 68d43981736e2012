//! Shared text formatting for tabular output.

/// Fixed 12-significant-digit scientific notation used in every CSV file.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Joins formatted floats with `sep`.
pub fn join_floats(values: &[f64], sep: &str) -> String {
    values.iter().map(|&v| fmt_float(v)).collect::<Vec<_>>().join(sep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_float(0.5), "5.00000000000e-1");
        assert_eq!(fmt_float(-1234.5), "-1.23450000000e3");
        assert_eq!(join_floats(&[1.0, 2.0], ";"), "1.00000000000e0;2.00000000000e0");
    }
}
