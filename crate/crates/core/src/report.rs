//! Helpers shared by the JSON reports.

use num_complex::Complex64;
use serde_json::{json, Value};

/// Rounds to 12 significant digits so reports are reproducible across
/// platforms and summation orders.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// A real number for a report; non-finite values become strings.
pub fn real_json(x: f64) -> Value {
    if x.is_finite() {
        json!(round_sig(x))
    } else {
        json!(x.to_string())
    }
}

/// A complex number as `[re, im]`.
pub fn complex_json(z: Complex64) -> Value {
    json!([real_json(z.re), real_json(z.im)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(-123456.7890123456), -123456.789012);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(real_json(f64::INFINITY), json!("inf"));
    }
}
