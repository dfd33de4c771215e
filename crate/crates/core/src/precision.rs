//! Decimal precision contract shared by every numeric routine.
//!
//! A [`WorkingPrecision`] of `d` digits promises results good to roughly
//! `10^(-d+5)` relative. Internally every routine carries extra guard digits
//! so that moderate cancellation (differences of nearly equal closed forms)
//! does not eat into the promised digits.

use rug::float::Round;
use rug::ops::Pow;
use rug::{Assign, Float};

use crate::error::{Error, Result};

pub const DEFAULT_DIGITS: u32 = 50;
pub const MIN_DIGITS: u32 = 30;
pub const MAX_DIGITS: u32 = 200;

/// Extra decimal digits carried beyond the caller's request.
pub const GUARD_DIGITS: u32 = 20;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WorkingPrecision {
    digits: u32,
}

impl Default for WorkingPrecision {
    fn default() -> Self {
        WorkingPrecision { digits: DEFAULT_DIGITS }
    }
}

impl WorkingPrecision {
    pub fn new(digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::argument(
                "WorkingPrecision::new",
                format!("digits must be >= {MIN_DIGITS}, got {digits}"),
            ));
        }
        if digits > MAX_DIGITS {
            return Err(Error::argument(
                "WorkingPrecision::new",
                format!("digits must be <= {MAX_DIGITS}, got {digits}"),
            ));
        }
        Ok(WorkingPrecision { digits })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Decimal digits actually carried by intermediate values.
    pub fn internal_digits(&self) -> u32 {
        self.digits + GUARD_DIGITS
    }

    /// Binary mantissa width used for every `Float` created under this contract.
    pub fn bits(&self) -> u32 {
        (self.internal_digits() as f64 * LOG2_10).ceil() as u32
    }

    pub fn float<T>(&self, value: T) -> Float
    where
        Float: Assign<T>,
    {
        Float::with_val(self.bits(), value)
    }

    pub fn zero(&self) -> Float {
        self.float(0)
    }

    pub fn one(&self) -> Float {
        self.float(1)
    }

    /// `10^exp` at working precision.
    pub fn pow10(&self, exp: i32) -> Float {
        self.float(10).pow(exp)
    }

    /// Relative size below which a positive series term is dropped: `10^(-digits-5)`.
    pub fn series_cutoff(&self) -> Float {
        self.pow10(-(self.digits as i32) - 5)
    }

    /// Relative resolution of the internal representation: `10^(-internal_digits)`.
    pub fn epsilon(&self) -> Float {
        self.pow10(-(self.internal_digits() as i32))
    }

    /// Sign checks treat values above `-10^(-digits+15)` as numerically zero.
    pub fn noise_floor(&self) -> Float {
        self.pow10(-(self.digits as i32) + 15)
    }

    /// Parses a decimal literal (`"0.1"`, `"1e-3"`, `"-2.5"`) at working precision.
    pub fn parse(&self, text: &str) -> Result<Float> {
        let parsed = Float::parse(text.trim()).map_err(|e| {
            Error::argument("WorkingPrecision::parse", format!("cannot parse {text:?}: {e}"))
        })?;
        let value = Float::with_val(self.bits(), parsed);
        if !value.is_finite() {
            return Err(Error::argument(
                "WorkingPrecision::parse",
                format!("{text:?} is not finite"),
            ));
        }
        Ok(value)
    }

    /// Formats with exactly `digits` significant decimal digits in scientific notation.
    pub fn format(&self, value: &Float) -> String {
        format_digits(value, self.digits)
    }
}

/// Scientific-notation decimal string with `digits` significant digits, e.g. `1.6449e0`.
pub fn format_digits(value: &Float, digits: u32) -> String {
    if value.is_zero() {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let (negative, mantissa, exp) =
        value.to_sign_string_exp_round(10, Some(digits as usize), Round::Nearest);
    let exp = exp.unwrap_or(0) - 1;
    let (head, tail) = mantissa.split_at(1);
    let sign = if negative { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{exp}")
    } else {
        format!("{sign}{head}.{tail}e{exp}")
    }
}

/// Relative distance `|a - b| / |b|` (absolute distance when `b` is zero).
pub fn rel_diff(a: &Float, b: &Float) -> Float {
    let diff = Float::with_val(a.prec().max(b.prec()), a - b).abs();
    if b.is_zero() {
        diff
    } else {
        diff / b.clone().abs()
    }
}
