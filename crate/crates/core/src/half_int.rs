//! Exact half-integer arithmetic for spin quantum numbers.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A value `twice / 2`, used for every spin magnitude and projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[derive(Serialize, Deserialize)]
#[serde(into = "f64", try_from = "f64")]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(n: i32) -> Self {
        HalfInt { twice: 2 * n }
    }

    /// Nearest half-integer to `x`, or `None` if `x` is farther than 1e-9 from one.
    pub fn from_f64(x: f64) -> Option<Self> {
        let t = (2.0 * x).round();
        if !x.is_finite() || (2.0 * x - t).abs() > 1e-9 || t.abs() > i32::MAX as f64 {
            return None;
        }
        Some(HalfInt { twice: t as i32 })
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// The integer value, if this is an integer.
    pub const fn to_int(self) -> Option<i32> {
        if self.is_integer() {
            Some(self.twice / 2)
        } else {
            None
        }
    }

    pub const fn abs(self) -> Self {
        HalfInt { twice: self.twice.abs() }
    }

    /// `(-1)^self` for integer `self`.
    pub fn parity_sign(self) -> Option<f64> {
        self.to_int().map(|n| if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 })
    }

    /// Half-integers `lo, lo+1, ..., hi` (unit steps, same parity as `lo`).
    pub fn unit_range(lo: HalfInt, hi: HalfInt) -> impl Iterator<Item = HalfInt> + Clone {
        (lo.twice..=hi.twice)
            .step_by(2)
            .map(HalfInt::from_twice)
    }

    /// Projections `-s, -s+1, ..., s`.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> + Clone {
        HalfInt::unit_range(-self, self)
    }

    /// Spins `lo, lo+1/2, ..., hi`.
    pub fn half_steps(lo: HalfInt, hi: HalfInt) -> impl Iterator<Item = HalfInt> + Clone {
        (lo.twice..=hi.twice).map(HalfInt::from_twice)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice + rhs.twice }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice - rhs.twice }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}

impl From<HalfInt> for f64 {
    fn from(h: HalfInt) -> f64 {
        h.value()
    }
}

impl TryFrom<f64> for HalfInt {
    type Error = String;
    fn try_from(x: f64) -> Result<Self, String> {
        HalfInt::from_f64(x).ok_or_else(|| format!("{x} is not a half-integer"))
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {0:?} as a half-integer")]
pub struct ParseHalfIntError(pub String);

impl FromStr for HalfInt {
    type Err = ParseHalfIntError;

    /// Accepts `"3/2"`, `"-1/2"`, `"2"` and `"1.5"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseHalfIntError(s.to_string());
        let t = s.trim();
        if let Some((num, den)) = t.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| err())?;
            match den.trim() {
                "1" => Ok(HalfInt::from_int(num)),
                "2" => Ok(HalfInt::from_twice(num)),
                _ => Err(err()),
            }
        } else if let Ok(n) = t.parse::<i32>() {
            Ok(HalfInt::from_int(n))
        } else {
            let x: f64 = t.parse().map_err(|_| err())?;
            HalfInt::from_f64(x).ok_or_else(err)
        }
    }
}
