//! Number formatting for command output.

/// How numbers are printed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Digits {
    /// Significant digits, `%g` style.
    Significant(usize),
    /// Shortest text that reads back to the same binary64.
    RoundTrip,
}

impl Default for Digits {
    fn default() -> Self {
        Digits::Significant(12)
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn number(x: f64, digits: Digits) -> String {
    let p = match digits {
        Digits::RoundTrip => return format!("{x:?}"),
        Digits::Significant(p) => p.max(1),
    };
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // decide the layout from the exponent after rounding
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        format!("{}e{}", trim_fraction(mantissa), exp)
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{:.*}", decimals, x)).to_string()
    }
}

pub fn row(xs: &[f64], digits: Digits) -> String {
    xs.iter().map(|&x| number(x, digits)).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant() {
        let d = Digits::Significant(12);
        assert_eq!(number(-6.0 / 7.0, d), "-0.857142857143");
        assert_eq!(number(2.0 / 3.0, Digits::Significant(10)), "0.6666666667");
        assert_eq!(number(-1.0, d), "-1");
        assert_eq!(number(0.0, d), "0");
        assert_eq!(number(1.5e-9, d), "1.5e-9");
        assert_eq!(number(123456789012345.0, d), "1.23456789012e14");
        assert_eq!(number(9.9999999999999e-6, Digits::Significant(3)), "1e-5");
    }

    #[test]
    fn round_trip() {
        let x = -6.0 / 7.0;
        assert_eq!(number(x, Digits::RoundTrip).parse::<f64>().unwrap(), x);
    }
}
