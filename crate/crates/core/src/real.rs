//! Extended-precision scalars.
//!
//! Every quantity on the expansion side of the crate is a [`rug::Float`]
//! carrying its own mantissa width. [`Precision`] is the single place where
//! that width is chosen, so values built from one `Precision` always combine
//! without silent rounding to a narrower type.

use std::fmt;

use rug::ops::Pow;
use rug::Float;

use crate::error::{PsletError, Result};

pub type Real = Float;

/// Guard bits added on top of the requested decimal digits.
const GUARD_BITS: u32 = 24;

/// Working precision, stored as a decimal digit count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Precision {
    digits: u32,
}

impl Precision {
    pub const DEFAULT_DIGITS: u32 = 60;

    pub fn from_digits(digits: u32) -> Self {
        Precision { digits: digits.max(10) }
    }

    /// The largest digit count whose mantissa fits in `bits`.
    pub fn from_bits(bits: u32) -> Self {
        let digits = (f64::from(bits.saturating_sub(GUARD_BITS)) / std::f64::consts::LOG2_10).floor() as u32;
        Precision::from_digits(digits)
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        (f64::from(self.digits) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
    }

    pub fn zero(&self) -> Real {
        Float::new(self.bits())
    }

    pub fn one(&self) -> Real {
        Float::with_val(self.bits(), 1)
    }

    pub fn int(&self, v: i64) -> Real {
        Float::with_val(self.bits(), v)
    }

    pub fn f64(&self, v: f64) -> Real {
        Float::with_val(self.bits(), v)
    }

    pub fn ratio(&self, num: i64, den: i64) -> Real {
        Float::with_val(self.bits(), num) / den
    }

    /// Parses a decimal literal exactly at this precision ("0.137" is not
    /// routed through `f64`).
    pub fn parse(&self, text: &str) -> Result<Real> {
        let parsed = Float::parse(text.trim())
            .map_err(|e| PsletError::Parse(format!("bad real literal {text:?}: {e}")))?;
        Ok(Float::with_val(self.bits(), parsed))
    }

    /// `10^-digits`, the relative resolution of this precision.
    pub fn epsilon(&self) -> Real {
        self.tolerance(self.digits as i32)
    }

    /// `10^-exp10` at this precision.
    pub fn tolerance(&self, exp10: i32) -> Real {
        let ten = Float::with_val(self.bits(), 10);
        ten.pow(-exp10)
    }

    pub fn widen(&self, x: &Real) -> Real {
        Float::with_val(self.bits(), x)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::from_digits(Self::DEFAULT_DIGITS)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} digits", self.digits)
    }
}

/// Renders `x` with `digits` significant decimal digits in plain or
/// scientific notation, whichever `rug` picks for the magnitude.
pub fn format_real(x: &Real, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits.max(1)))
}

/// Fixed-point rendering with `decimals` digits after the point.
pub fn format_fixed(x: &Real, decimals: usize) -> String {
    let scale = Float::with_val(x.prec(), 10).pow(decimals as i32);
    let scaled = Float::with_val(x.prec(), x * &scale).round();
    let int = scaled
        .to_integer()
        .expect("finite value when formatting");
    let negative = int < 0;
    let digits = int.abs().to_string();
    let padded = if digits.len() <= decimals {
        format!("{}{}", "0".repeat(decimals + 1 - digits.len()), digits)
    } else {
        digits
    };
    let split = padded.len() - decimals;
    let body = if decimals == 0 {
        padded
    } else {
        format!("{}.{}", &padded[..split], &padded[split..])
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// Largest absolute value in a slice, zero for an empty slice.
pub fn max_abs(prec: Precision, values: &[Real]) -> Real {
    values.iter().fold(prec.zero(), |acc, v| {
        let a = Float::with_val(prec.bits(), v.abs_ref());
        if a > acc {
            a
        } else {
            acc
        }
    })
}
