//! Reproducible text for floating-point report values: 12 significant
//! digits, ties rounded to even (the rounding of Rust's exact formatter).

use serde::{Serialize, Serializer};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` with 12 significant digits, positional notation for
/// exponents in `-6..12` and `d.ddddde±k` otherwise.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let body = if (0..12).contains(&exp) {
        let split = exp as usize + 1;
        let (int_part, frac) = digits.split_at(split);
        if frac.is_empty() {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac}")
        }
    } else if (-6..0).contains(&exp) {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        format!("{}.{}e{exp}", &digits[..1], &digits[1..])
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// Serializes as `sig12` text.
pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&sig12(*x))
}

/// Serializes an optional real as `sig12` text or null.
pub fn serialize_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&sig12(*v)),
        None => s.serialize_none(),
    }
}

/// Serializes any displayable value (big integers) as a JSON string.
pub fn dec<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn dec_opt<T: std::fmt::Display, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.collect_str(x),
        None => s.serialize_none(),
    }
}

pub fn dec_vec<T: std::fmt::Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

pub fn dec_opt_vec<T: std::fmt::Display, S: Serializer>(v: &Option<Vec<T>>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(xs) => dec_vec(xs, s),
        None => s.serialize_none(),
    }
}

/// Wrapper for ad-hoc serialization of a real as `sig12` text.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig12(pub f64);

impl Serialize for Sig12 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize(&self.0, s)
    }
}
