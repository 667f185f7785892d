//! `%.12e` rendering, as printf does it: 12 fractional digits and an
//! exponent with a sign and at least two digits.

pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

#[cfg(test)]
mod tests {
    use super::sci;

    #[test]
    fn matches_printf() {
        assert_eq!(sci(0.0), "0.000000000000e+00");
        assert_eq!(sci(1.0), "1.000000000000e+00");
        assert_eq!(sci(-2.5e-5), "-2.500000000000e-05");
        assert_eq!(sci(6.02214076e23), "6.022140760000e+23");
        assert_eq!(sci(1e-300), "1.000000000000e-300");
        assert_eq!(sci(123456.7890123456), "1.234567890123e+05");
    }
}
