//! Numeric formatting shared by report writers.

/// Scientific notation with 12 significant digits. All floating point values
/// that appear in CSV, JSON or transcript output go through this so that a
/// value prints identically everywhere. Negative zero is flattened to zero.
pub fn sig12(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(sig12(0.72), "7.20000000000e-1");
        assert_eq!(sig12(1.0), "1.00000000000e0");
        assert_eq!(sig12(0.0), "0.00000000000e0");
        assert_eq!(sig12(-0.0), "0.00000000000e0");
        assert_eq!(sig12(-2.5e-13), "-2.50000000000e-13");
    }
}
