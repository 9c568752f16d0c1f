//! Locale-independent number formatting for reports and CSV output.

/// Significant digits written for every real number.
pub const DIGITS: usize = 13;

/// Shortest of fixed or scientific notation with [`DIGITS`] significant
/// digits and trailing zeros removed, like C's `%.13g`.
pub fn real(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", DIGITS - 1, v);
    let (mantissa, exponent) = sci.split_once('e').expect("scientific notation");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if exponent < -4 || exponent >= DIGITS as i32 {
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exponent.abs())
    } else {
        let decimals = (DIGITS as i32 - 1 - exponent).max(0) as usize;
        trim(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_format() {
        assert_eq!(real(std::f64::consts::E), "2.718281828459");
        assert_eq!(real(1.0), "1");
        assert_eq!(real(-0.5), "-0.5");
        assert_eq!(real(1e-7), "1e-07");
        assert_eq!(real(1.5e20), "1.5e+20");
        assert_eq!(real(123456.0), "123456");
        assert_eq!(real(0.0001234), "0.0001234");
        assert_eq!(real(4.5e-5), "4.5e-05");
        assert_eq!(real(f64::NAN), "nan");
    }

    #[test]
    fn round_trips_to_thirteen_digits() {
        for v in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-9, 987654.3210987] {
            let back: f64 = real(v).parse().unwrap();
            assert!(((back - v) / v).abs() <= 5e-13);
        }
    }
}
