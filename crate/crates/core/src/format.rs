//! Number formatting shared by the CSV writers.

/// Plain (non-exponent) decimal rendering with 17 significant digits.
pub fn plain_decimal(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .unwrap_or(0);
    let decimals = (16 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

#[cfg(test)]
mod tests {
    use super::plain_decimal;

    #[test]
    fn seventeen_digits() {
        assert_eq!(plain_decimal(-3.0), "-3.0000000000000000");
        assert_eq!(plain_decimal(0.0), "0.0000000000000000");
        assert_eq!(plain_decimal(0.1), "0.10000000000000001");
        assert_eq!(plain_decimal(1234.5), "1234.5000000000000");
        assert_eq!(plain_decimal(1e20), "100000000000000000000");
    }

    #[test]
    fn round_trips() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, 2.5e-7, -9.87654321e5, 1e-300] {
            assert_eq!(plain_decimal(x).parse::<f64>().unwrap(), x);
        }
    }
}
