//! Signed values stored as `sign * exp(log_abs)`.
//!
//! Products of many factorial ratios and efficiency powers leave the range of
//! `f64` long before their final product does, so they are formed here and
//! converted to linear scale only when accumulated.

use std::ops::{Div, Mul};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogMagnitude {
    sign: i8,
    log_abs: f64,
}

impl LogMagnitude {
    pub const ZERO: LogMagnitude = LogMagnitude { sign: 0, log_abs: f64::NEG_INFINITY };
    pub const ONE: LogMagnitude = LogMagnitude { sign: 1, log_abs: 0.0 };

    pub fn new(sign: i8, log_abs: f64) -> Self {
        if sign == 0 || log_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogMagnitude { sign: sign.signum(), log_abs }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogMagnitude { sign: if x > 0.0 { 1 } else { -1 }, log_abs: x.abs().ln() }
        }
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn log_abs(self) -> f64 {
        self.log_abs
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_abs.exp()
        }
    }

    pub fn neg(self) -> Self {
        LogMagnitude { sign: -self.sign, log_abs: self.log_abs }
    }

    /// `base^exponent` for `base >= 0`, with `0^0 = 1`.
    pub fn pow_nonneg(base: f64, exponent: f64) -> Self {
        debug_assert!(base >= 0.0);
        if exponent == 0.0 {
            Self::ONE
        } else if base == 0.0 {
            if exponent > 0.0 {
                Self::ZERO
            } else {
                LogMagnitude { sign: 1, log_abs: f64::INFINITY }
            }
        } else {
            LogMagnitude { sign: 1, log_abs: exponent * base.ln() }
        }
    }

    /// `base^n` for any real base and integer `n >= 0`.
    pub fn powi(base: f64, n: u32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        let b = Self::from_f64(base);
        if b.is_zero() {
            return Self::ZERO;
        }
        let sign = if b.sign < 0 && n % 2 == 1 { -1 } else { 1 };
        LogMagnitude { sign, log_abs: f64::from(n) * b.log_abs }
    }

    /// Square root of a nonnegative value.
    pub fn sqrt(self) -> Self {
        debug_assert!(self.sign >= 0, "sqrt of negative LogMagnitude");
        if self.sign == 0 {
            Self::ZERO
        } else {
            LogMagnitude { sign: 1, log_abs: 0.5 * self.log_abs }
        }
    }
}

impl Mul for LogMagnitude {
    type Output = LogMagnitude;
    fn mul(self, rhs: LogMagnitude) -> LogMagnitude {
        if self.sign == 0 || rhs.sign == 0 {
            Self::ZERO
        } else {
            LogMagnitude { sign: self.sign * rhs.sign, log_abs: self.log_abs + rhs.log_abs }
        }
    }
}

impl Div for LogMagnitude {
    type Output = LogMagnitude;
    fn div(self, rhs: LogMagnitude) -> LogMagnitude {
        assert!(rhs.sign != 0, "division by zero LogMagnitude");
        if self.sign == 0 {
            Self::ZERO
        } else {
            LogMagnitude { sign: self.sign * rhs.sign, log_abs: self.log_abs - rhs.log_abs }
        }
    }
}

impl std::iter::Product for LogMagnitude {
    fn product<I: Iterator<Item = LogMagnitude>>(iter: I) -> Self {
        iter.fold(Self::ONE, |a, b| a * b)
    }
}

/// Signed sum by factoring out the largest magnitude before exponentiating.
pub fn log_sum(terms: &[LogMagnitude]) -> LogMagnitude {
    let max = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.log_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return LogMagnitude::ZERO;
    }
    let scaled: f64 = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| f64::from(t.sign) * (t.log_abs - max).exp())
        .sum();
    let s = LogMagnitude::from_f64(scaled);
    LogMagnitude::new(s.sign, s.log_abs + max)
}
