//! Exact rational numbers for the elicitation arithmetic.
//!
//! Threshold fitting, deck-of-cards intensities and revised Simos weights are
//! computed with [`Exact`] so that results such as `2/13` come out exactly.
//! The textual form is `n/d` (or `n` when the denominator is one); parsing
//! also accepts plain decimals such as `-12.75`.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Exact(Ratio<i128>);

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid number `{0}`")]
pub struct ParseExactError(pub String);

impl Exact {
    pub const ZERO: Exact = Exact(Ratio::new_raw(0, 1));
    pub const ONE: Exact = Exact(Ratio::new_raw(1, 1));

    /// Panics if `denominator` is zero.
    pub fn new(numerator: i128, denominator: i128) -> Self {
        Exact(Ratio::new(numerator, denominator))
    }

    pub fn integer(value: i128) -> Self {
        Exact(Ratio::from_integer(value))
    }

    /// Reads the shortest decimal representation of `value`, so `0.1` becomes `1/10`.
    pub fn from_f64(value: f64) -> Option<Self> {
        if !value.is_finite() {
            return None;
        }
        format!("{value}").parse().ok()
    }

    pub fn numerator(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denominator(&self) -> i128 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator() as f64 / self.denominator() as f64
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Exact(self.0.abs())
    }

    /// `None` when dividing by zero.
    pub fn checked_div(&self, rhs: &Exact) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(Exact(self.0 / rhs.0))
        }
    }

    /// Rounds half away from zero to `places` decimal digits.
    pub fn round_dp(&self, places: u32) -> Self {
        let scale = 10i128.pow(places);
        let numer = self.numerator();
        let denom = self.denominator();
        let magnitude = (numer.abs() * scale * 2 + denom) / (denom * 2);
        let signed = if numer < 0 { -magnitude } else { magnitude };
        Exact(Ratio::new(signed, scale))
    }

    /// Decimal text rounded half away from zero, trailing zeros removed (`2.2`, `1.83`, `4`).
    pub fn format_dp(&self, places: u32) -> String {
        let rounded = self.round_dp(places);
        let scale = 10i128.pow(places);
        let scaled = rounded.0 * Ratio::from_integer(scale);
        debug_assert!(scaled.is_integer());
        let units = scaled.to_integer();
        let negative = units < 0;
        let units = units.abs();
        let whole = units / scale;
        let mut frac = format!("{:0width$}", units % scale, width = places as usize);
        while frac.ends_with('0') {
            frac.pop();
        }
        let sign = if negative { "-" } else { "" };
        if frac.is_empty() {
            format!("{sign}{whole}")
        } else {
            format!("{sign}{whole}.{frac}")
        }
    }
}

impl Default for Exact {
    fn default() -> Self {
        Exact::ZERO
    }
}

impl From<i64> for Exact {
    fn from(value: i64) -> Self {
        Exact::integer(value as i128)
    }
}

impl From<i32> for Exact {
    fn from(value: i32) -> Self {
        Exact::integer(value as i128)
    }
}

impl From<u32> for Exact {
    fn from(value: u32) -> Self {
        Exact::integer(value as i128)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.numerator())
        } else {
            write!(f, "{}/{}", self.numerator(), self.denominator())
        }
    }
}

fn parse_decimal(text: &str) -> Option<Ratio<i128>> {
    let (negative, body) = match text.as_bytes().first()? {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut numer: i128 = 0;
    for b in whole.bytes().chain(frac.bytes()) {
        numer = numer.checked_mul(10)?.checked_add((b - b'0') as i128)?;
    }
    let denom = 10i128.checked_pow(frac.len() as u32)?;
    let value = Ratio::new(numer, denom);
    Some(if negative { -value } else { value })
}

impl FromStr for Exact {
    type Err = ParseExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let err = || ParseExactError(text.to_string());
        match text.split_once('/') {
            Some((n, d)) => {
                let n = parse_decimal(n.trim()).ok_or_else(err)?;
                let d = parse_decimal(d.trim()).ok_or_else(err)?;
                if d.is_zero() {
                    return Err(err());
                }
                Ok(Exact(n / d))
            }
            None => parse_decimal(text).map(Exact).ok_or_else(err),
        }
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        Exact(self.0 + rhs.0)
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        Exact(self.0 - rhs.0)
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Exact) -> Exact {
        Exact(self.0 * rhs.0)
    }
}

impl Div for Exact {
    type Output = Exact;
    fn div(self, rhs: Exact) -> Exact {
        Exact(self.0 / rhs.0)
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact(-self.0)
    }
}

impl core::iter::Sum for Exact {
    fn sum<I: Iterator<Item = Exact>>(iter: I) -> Exact {
        iter.fold(Exact::ZERO, Add::add)
    }
}

impl One for Exact {
    fn one() -> Self {
        Exact::ONE
    }
}

impl Zero for Exact {
    fn zero() -> Self {
        Exact::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

struct ExactVisitor;

impl Visitor<'_> for ExactVisitor {
    type Value = Exact;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a number or a string such as \"2/13\" or \"-0.75\"")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Exact, E> {
        v.parse().map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exact, E> {
        Ok(Exact::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exact, E> {
        Ok(Exact::integer(v as i128))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Exact, E> {
        Exact::from_f64(v).ok_or_else(|| E::custom("number is not finite"))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Exact, D::Error> {
        deserializer.deserialize_any(ExactVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(s: &str) -> Exact {
        s.parse().unwrap()
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(ex("2/13"), Exact::new(2, 13));
        assert_eq!(ex("-10/13"), Exact::new(-10, 13));
        assert_eq!(ex("-0.75"), Exact::new(-3, 4));
        assert_eq!(ex("17.00"), Exact::integer(17));
        assert_eq!(ex(".5"), Exact::new(1, 2));
        assert_eq!(ex("1.5/3"), Exact::new(1, 2));
        assert!("1/0".parse::<Exact>().is_err());
        assert!("abc".parse::<Exact>().is_err());
        assert!("".parse::<Exact>().is_err());
        assert!("-".parse::<Exact>().is_err());
    }

    #[test]
    fn display_is_reduced() {
        assert_eq!(Exact::new(4, 26).to_string(), "2/13");
        assert_eq!(Exact::new(-6, 3).to_string(), "-2");
    }

    #[test]
    fn from_f64_uses_shortest_decimal() {
        assert_eq!(Exact::from_f64(0.1), Some(Exact::new(1, 10)));
        assert_eq!(Exact::from_f64(5.5), Some(Exact::new(11, 2)));
        assert_eq!(Exact::from_f64(f64::NAN), None);
    }

    #[test]
    fn rounding_half_away_from_zero() {
        assert_eq!(Exact::new(11, 6).format_dp(2), "1.83");
        assert_eq!(Exact::new(37, 12).format_dp(2), "3.08");
        assert_eq!(Exact::new(13, 3).format_dp(2), "4.33");
        assert_eq!(Exact::new(11, 5).format_dp(2), "2.2");
        assert_eq!(Exact::integer(4).format_dp(2), "4");
        assert_eq!(Exact::new(1, 8).format_dp(2), "0.13");
        assert_eq!(Exact::new(-1, 8).format_dp(2), "-0.13");
        assert_eq!(Exact::new(-1, 1000).format_dp(2), "0");
    }
}
