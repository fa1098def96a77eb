//! Fixed float formatting shared by every machine-readable output.

/// Formats `x` with exactly nine significant digits in positional notation,
/// e.g. `6.00000000`, `1134.60000`, `0.00123456789`.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.00000000".into();
    }
    // Round first so that e.g. 9.999999999 picks the exponent of 10.
    let rounded: f64 = format!("{:.8e}", x).parse().unwrap_or(x);
    let exp = rounded.abs().log10().floor() as i32;
    let decimals = (8 - exp).max(0) as usize;
    format!("{:.*}", decimals, rounded)
}

#[cfg(test)]
mod tests {
    use super::sig9;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(6.0), "6.00000000");
        assert_eq!(sig9(1134.6), "1134.60000");
        assert_eq!(sig9(0.5), "0.500000000");
        assert_eq!(sig9(0.00123456789), "0.00123456789");
        assert_eq!(sig9(9.9999999999), "10.0000000");
        assert_eq!(sig9(123456789012.0), "123456789000");
        assert_eq!(sig9(-2.5), "-2.50000000");
        assert_eq!(sig9(0.0), "0.00000000");
    }
}
