//! Working-precision configuration and small helpers around `rug::Float`.

use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// Extra mantissa bits carried on top of the requested decimal digits.
const GUARD_BITS: u32 = 24;

/// Precision used for every multiprecision evaluation.
///
/// `working_digits` is the number of significant decimal digits carried
/// through the computation; `abs_tol` is the absolute error target for each
/// scalar special-function result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionConfig {
    working_digits: u32,
    abs_tol: f64,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            working_digits: 50,
            abs_tol: 1e-20,
        }
    }
}

impl PrecisionConfig {
    pub const MIN_DIGITS: u32 = 20;

    pub fn new(working_digits: u32, abs_tol: f64) -> Result<Self> {
        if working_digits < Self::MIN_DIGITS {
            return Err(Error::Domain(format!(
                "working_digits must be at least {}, got {working_digits}",
                Self::MIN_DIGITS
            )));
        }
        if !(abs_tol > 0.0) || !abs_tol.is_finite() {
            return Err(Error::Domain(format!(
                "abs_tol must be positive and finite, got {abs_tol}"
            )));
        }
        Ok(PrecisionConfig {
            working_digits,
            abs_tol,
        })
    }

    /// Default tolerance at the given number of digits.
    pub fn with_digits(working_digits: u32) -> Result<Self> {
        Self::new(working_digits, Self::default().abs_tol)
    }

    pub fn working_digits(&self) -> u32 {
        self.working_digits
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    /// Mantissa bits for `Float` values at this precision.
    pub fn bits(&self) -> u32 {
        // log2(10) = 3.3219...
        (f64::from(self.working_digits) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
    }

    pub fn float<T>(&self, value: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits(), value)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits(), Constant::Pi)
    }

    /// Parses a decimal literal (e.g. `"4.2826451e-6"`) directly at working
    /// precision, never passing through `f64`.
    pub fn parse(&self, text: &str) -> Result<Float> {
        parse_decimal(text, self.bits())
    }
}

pub(crate) fn parse_decimal(text: &str, bits: u32) -> Result<Float> {
    let trimmed = text.trim();
    let parsed = Float::parse(trimmed)
        .map_err(|e| Error::Parse(format!("invalid decimal {trimmed:?}: {e}")))?;
    let value = Float::with_val(bits, parsed);
    if !value.is_finite() {
        return Err(Error::Parse(format!("non-finite decimal {trimmed:?}")));
    }
    Ok(value)
}

/// Exact rational `num/den` at `bits` precision.
pub(crate) fn ratio(num: i64, den: i64, bits: u32) -> Float {
    Float::with_val(bits, num) / den
}

/// `x` rounded up to a multiple of `10^-places`, computed exactly.
pub fn ceil_decimal(x: f64, places: u32) -> f64 {
    let scaled_units = ceil_units(x, places);
    scaled_units as f64 / 10f64.powi(places as i32)
}

/// `ceil(x * 10^places)` computed on the exact binary value of `x`.
pub fn ceil_units(x: f64, places: u32) -> i64 {
    let exact = rug::Rational::from_f64(x).expect("finite value");
    let scale = rug::Integer::from(10).pow(places);
    let scaled = exact * scale;
    let (_, ceil) = scaled.fract_ceil(rug::Integer::new());
    ceil.to_i64().expect("scaled value fits in i64")
}

/// Round-to-nearest conversion used for reporting.
pub(crate) fn to_f64(x: &Float) -> f64 {
    x.to_f64_round(Round::Nearest)
}
