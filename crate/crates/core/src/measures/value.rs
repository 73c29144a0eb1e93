use std::fmt;

use serde::{Serialize, Serializer};

/// A measure value on the extended real line, or undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureValue {
    Finite(f64),
    PosInf,
    NegInf,
    Undefined,
}

impl MeasureValue {
    /// NaN maps to `Undefined`.
    pub fn from_f64(x: f64) -> Self {
        if x.is_nan() {
            MeasureValue::Undefined
        } else if x == f64::INFINITY {
            MeasureValue::PosInf
        } else if x == f64::NEG_INFINITY {
            MeasureValue::NegInf
        } else {
            MeasureValue::Finite(x)
        }
    }

    /// Inverse of [`MeasureValue::from_f64`].
    pub fn to_f64(self) -> f64 {
        match self {
            MeasureValue::Finite(x) => x,
            MeasureValue::PosInf => f64::INFINITY,
            MeasureValue::NegInf => f64::NEG_INFINITY,
            MeasureValue::Undefined => f64::NAN,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            MeasureValue::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_defined(self) -> bool {
        !matches!(self, MeasureValue::Undefined)
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureValue::Finite(x) => write!(f, "{x}"),
            MeasureValue::PosInf => f.write_str("inf"),
            MeasureValue::NegInf => f.write_str("-inf"),
            MeasureValue::Undefined => f.write_str("undefined"),
        }
    }
}

impl Serialize for MeasureValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MeasureValue::Finite(x) => s.serialize_f64(*x),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

/// `x / y` with the sign-of-numerator convention on a zero denominator.
#[inline]
pub(crate) fn div(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        if x > 0.0 {
            f64::INFINITY
        } else if x < 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::NAN
        }
    } else {
        x / y
    }
}

/// `c · log2(r)`, zero whenever the coefficient is zero.
#[inline]
pub(crate) fn xlog2(c: f64, r: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * r.log2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_convention() {
        assert_eq!(div(1.0, 0.0), f64::INFINITY);
        assert_eq!(div(1.0, -0.0), f64::INFINITY);
        assert_eq!(div(-2.0, 0.0), f64::NEG_INFINITY);
        assert!(div(0.0, 0.0).is_nan());
        assert_eq!(div(3.0, 4.0), 0.75);
    }

    #[test]
    fn zero_coefficient_log() {
        assert_eq!(xlog2(0.0, 0.0), 0.0);
        assert_eq!(xlog2(0.5, 0.0), f64::NEG_INFINITY);
        assert_eq!(xlog2(0.5, 4.0), 1.0);
    }

    #[test]
    fn display_and_round_trip() {
        assert_eq!(MeasureValue::Finite(0.8).to_string(), "0.8");
        assert_eq!(MeasureValue::from_f64(f64::INFINITY).to_string(), "inf");
        assert_eq!(MeasureValue::from_f64(f64::NAN), MeasureValue::Undefined);
        assert_eq!(MeasureValue::NegInf.to_f64(), f64::NEG_INFINITY);
    }
}
