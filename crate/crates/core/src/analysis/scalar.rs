use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Numeric type used for accuracies and drops.
///
/// Implemented for `f32`, `f64` and `Ratio<i64>`. The rational form gives
/// exact percentages and exact differences.
pub trait Scalar: Num + Signed + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug {
    /// `num / den`. `den` must be non-zero.
    fn from_ratio(num: u64, den: u64) -> Self;

    /// Parses a plain decimal such as `78.91` or `-3`.
    fn parse_decimal(s: &str) -> Option<Self>;

    /// Rounds half away from zero to two decimal places.
    fn round2(self) -> Self;

    /// Two-decimal text form.
    fn fmt2(self) -> String;
}

fn split_decimal(s: &str) -> Option<(bool, &str, &str)> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if (int.is_empty() && frac.is_empty()) || !digits(int) || !digits(frac) {
        return None;
    }
    Some((neg, int, frac))
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_ratio(num: u64, den: u64) -> Self {
                num as $t / den as $t
            }

            fn parse_decimal(s: &str) -> Option<Self> {
                split_decimal(s)?;
                s.trim().parse().ok()
            }

            fn round2(self) -> Self {
                (self * 100.0).round() / 100.0
            }

            fn fmt2(self) -> String {
                let r = self.round2();
                // avoid "-0.00"
                let r = if r == 0.0 { 0.0 } else { r };
                format!("{r:.2}")
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for Ratio<i64> {
    fn from_ratio(num: u64, den: u64) -> Self {
        Ratio::new(num as i64, den as i64)
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        let (neg, int, frac) = split_decimal(s)?;
        let den = 10i64.checked_pow(frac.len() as u32)?;
        let int: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
        let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
        let num = int.checked_mul(den)?.checked_add(frac)?;
        Some(Ratio::new(if neg { -num } else { num }, den))
    }

    fn round2(self) -> Self {
        (self * 100).round() / 100
    }

    fn fmt2(self) -> String {
        let hundredths = (self * 100).round().to_integer();
        let sign = if hundredths < 0 { "-" } else { "" };
        let a = hundredths.unsigned_abs();
        format!("{sign}{}.{:02}", a / 100, a % 100)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Ratio<i64>;

    #[test]
    fn exact_decimal_parse() {
        assert_eq!(Q::parse_decimal("78.91"), Some(Q::new(7891, 100)));
        assert_eq!(Q::parse_decimal("-0.5"), Some(Q::new(-1, 2)));
        assert_eq!(Q::parse_decimal("12"), Some(Q::from_integer(12)));
        assert_eq!(Q::parse_decimal("1e3"), None);
        assert_eq!(Q::parse_decimal("."), None);
        assert_eq!(f64::parse_decimal("nan"), None);
    }

    #[test]
    fn rounding_and_format() {
        assert_eq!(Q::from_ratio(100, 3).fmt2(), "33.33");
        assert_eq!(Q::from_ratio(200, 3).fmt2(), "66.67");
        assert_eq!(Q::new(-1765, 100).fmt2(), "-17.65");
        assert_eq!(Q::new(1, 200).fmt2(), "0.01");
        assert_eq!(100.0f64.fmt2(), "100.00");
        assert_eq!((-0.001f64).fmt2(), "0.00");
        assert_eq!(Q::from_ratio(700, 9).round2(), Q::new(7778, 100));
    }
}
