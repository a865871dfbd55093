//! Stable report encoding: costs as decimal strings with 12 significant digits.

use serde::{Deserialize, Deserializer, Serializer};

pub const SCHEMA_VERSION: &str = "1";

/// Formats `x` with 12 significant digits, trailing zeros removed.
/// Infinities are written `inf` and `-inf`.
pub fn decimal(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let body = if (-6..12).contains(&exp) {
        if exp >= 0 {
            let split = exp as usize + 1;
            let (int, frac) = digits.split_at(split);
            let frac = frac.trim_end_matches('0');
            if frac.is_empty() {
                int.to_string()
            } else {
                format!("{int}.{frac}")
            }
        } else {
            let zeros = "0".repeat((-exp - 1) as usize);
            format!("0.{zeros}{}", digits.trim_end_matches('0'))
        }
    } else {
        let (first, rest) = digits.split_at(1);
        let rest = rest.trim_end_matches('0');
        if rest.is_empty() {
            format!("{first}e{exp}")
        } else {
            format!("{first}.{rest}e{exp}")
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

pub fn parse_decimal(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => s.parse().ok(),
    }
}

/// Serde adapter writing an `f64` as a [`decimal`] string.
pub mod decimal_serde {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&decimal(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        parse_decimal(&s).ok_or_else(|| serde::de::Error::custom(format!("bad decimal {s:?}")))
    }
}

/// Same as [`decimal_serde`] for optional values.
pub mod decimal_opt_serde {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_str(&decimal(*v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| parse_decimal(&s).ok_or_else(|| serde::de::Error::custom(format!("bad decimal {s:?}"))))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(decimal(40.0), "40");
        assert_eq!(decimal(3.2806851126554815), "3.28068511266");
        assert_eq!(decimal(-0.5), "-0.5");
        assert_eq!(decimal(0.000123), "0.000123");
        assert_eq!(decimal(1e-9), "1e-9");
        assert_eq!(decimal(123456789012345.0), "1.23456789012e14");
        assert_eq!(decimal(f64::INFINITY), "inf");
        assert_eq!(decimal(0.0), "0");
        assert_eq!(decimal(999999999999.9), "1e12");
    }

    #[test]
    fn round_trip_within_precision() {
        for x in [1.0, 2.5, 1e-3, 12345.678, -7.25, 6.129283016944966] {
            let back = parse_decimal(&decimal(x)).unwrap();
            assert!((back - x).abs() <= x.abs() * 1e-11);
        }
    }
}
