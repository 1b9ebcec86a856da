//! Text encoding of numbers in report files.

/// Marker written for undefined values.
pub const UNDEFINED: &str = "NA";

/// 15 significant digits in scientific notation, e.g. `9.53101798043249e-2`.
pub fn float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return UNDEFINED.to_owned();
    }
    format!("{x:.14e}")
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map_or_else(|| UNDEFINED.to_owned(), float)
}

/// Inverse of [`opt_float`].
pub fn parse_opt_float(s: &str) -> Result<Option<f64>, std::num::ParseFloatError> {
    if s == UNDEFINED {
        return Ok(None);
    }
    s.parse().map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(float(0.0), "0");
        assert_eq!(float(-0.0), "0");
        assert_eq!(float(1.0), "1.00000000000000e0");
        assert_eq!(float(1.1f64.ln()), "9.53101798043249e-2");
        assert_eq!(float(-250.5), "-2.50500000000000e2");
        assert_eq!(opt_float(None), "NA");
        assert_eq!(parse_opt_float("NA").unwrap(), None);
    }

    proptest::proptest! {
        #[test]
        fn round_trip_keeps_15_digits(x in proptest::num::f64::NORMAL) {
            let back = parse_opt_float(&float(x)).unwrap().unwrap();
            proptest::prop_assert!(((back - x) / x).abs() <= 5e-15);
        }
    }
}
