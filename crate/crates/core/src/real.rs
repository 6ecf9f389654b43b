//! Extended reals, checker tolerances and real-number parsing.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Absolute tolerance used by every feasibility and guarantee check.
pub const TOL: f64 = 1e-9;

/// Slack used when snapping a real onto an integer grid.
const GRID_SLACK: f64 = 1e-9;

/// `ceil(x)` that treats values within `1e-9` above an integer as that integer.
pub fn ceil_tol(x: f64) -> i64 {
    (x - GRID_SLACK).ceil() as i64
}

/// `floor(x)` that treats values within `1e-9` below an integer as that integer.
pub fn floor_tol(x: f64) -> i64 {
    (x + GRID_SLACK).floor() as i64
}

/// A non-negative real or `+∞`; used for payments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub const ZERO: ExtendedReal = ExtendedReal::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// The value as an `f64`, mapping `Infinite` to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(x) => x,
            ExtendedReal::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::Infinite => None,
        }
    }

    /// Budget feasibility `self ≤ budget`, up to [`TOL`].
    pub fn within(self, budget: f64) -> bool {
        match self {
            ExtendedReal::Finite(x) => x <= budget + TOL,
            ExtendedReal::Infinite => false,
        }
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;

    fn add(self, rhs: ExtendedReal) -> ExtendedReal {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::Infinite,
        }
    }
}

impl Eq for ExtendedReal {}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.total_cmp(b),
            (ExtendedReal::Finite(_), ExtendedReal::Infinite) => Ordering::Less,
            (ExtendedReal::Infinite, ExtendedReal::Finite(_)) => Ordering::Greater,
            (ExtendedReal::Infinite, ExtendedReal::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(x) => serializer.serialize_f64(*x),
            ExtendedReal::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let x = de_real(deserializer)?;
        Ok(if x.is_infinite() { ExtendedReal::Infinite } else { ExtendedReal::Finite(x) })
    }
}

/// Parses a decimal (`"0.0625"`), a ratio (`"1/16"`) or `"inf"`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    let x = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let den: f64 = den.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if den == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            num / den
        }
        None => s.parse().map_err(|_| format!("not a real number: {s:?}"))?,
    };
    if x.is_nan() {
        return Err(format!("not a real number: {s:?}"));
    }
    Ok(x)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RealRepr {
    Number(f64),
    Text(String),
}

impl RealRepr {
    fn into_f64<E: serde::de::Error>(self) -> Result<f64, E> {
        match self {
            RealRepr::Number(x) => Ok(x),
            RealRepr::Text(s) => parse_real(&s).map_err(E::custom),
        }
    }
}

/// Deserializes a real given either as a JSON number or as a string.
pub fn de_real<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
    RealRepr::deserialize(deserializer)?.into_f64()
}

pub fn de_real_vec<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<f64>, D::Error> {
    Vec::<RealRepr>::deserialize(deserializer)?.into_iter().map(RealRepr::into_f64).collect()
}

pub fn de_real_matrix<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<Vec<f64>>, D::Error> {
    Vec::<Vec<RealRepr>>::deserialize(deserializer)?
        .into_iter()
        .map(|row| row.into_iter().map(RealRepr::into_f64).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs() {
        let a = ExtendedReal::Finite(1.5);
        assert_eq!(a + ExtendedReal::Infinite, ExtendedReal::Infinite);
        assert_eq!(a + a, ExtendedReal::Finite(3.0));
        assert!(a < ExtendedReal::Infinite);
        assert!(!ExtendedReal::Infinite.within(1.0));
        assert!(ExtendedReal::Finite(1.0 + 1e-12).within(1.0));
    }

    #[test]
    fn parses_decimal_and_ratio_strings() {
        assert_eq!(parse_real("0.25").unwrap(), 0.25);
        assert_eq!(parse_real("1/16").unwrap(), 0.0625);
        assert_eq!(parse_real("inf").unwrap(), f64::INFINITY);
        assert!(parse_real("1/0").is_err());
        assert!(parse_real("abc").is_err());
    }

    #[test]
    fn tolerant_rounding() {
        assert_eq!(ceil_tol(2.0 / 0.4), 5);
        assert_eq!(ceil_tol(5.000_000_000_01), 5);
        assert_eq!(ceil_tol(5.1), 6);
        assert_eq!(floor_tol(2.999_999_999_99), 3);
        assert_eq!(floor_tol(2.9), 2);
    }
}
