//! Tolerant comparisons on extended reals, NaN standing for undefined.

use serde::{Deserialize, Serialize};

use crate::contingency::ContingencyTable;
use crate::measures::{evaluate_f64, MeasureParams, RuleContext};

/// Equality within `tol` on finite values, by sign on infinities. Two
/// undefined values are not a difference; exactly one undefined is.
pub fn same(x: f64, y: f64, tol: f64) -> bool {
    match (x.is_nan(), y.is_nan()) {
        (true, true) => true,
        (true, false) | (false, true) => false,
        _ => {
            if x.is_finite() && y.is_finite() {
                (x - y).abs() <= tol
            } else {
                x == y
            }
        }
    }
}

/// `x > y` by more than `tol`; false when either side is undefined.
pub fn above(x: f64, y: f64, tol: f64) -> bool {
    if x.is_nan() || y.is_nan() {
        return false;
    }
    if x.is_finite() && y.is_finite() {
        x > y + tol
    } else {
        x > y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `m(first)` and `m(second)` differ.
    Differ,
    /// `m(second)` is not `-m(first)`.
    NotNegated,
    /// `m(first) > m(second)` beyond tolerance.
    Exceeds,
    /// `m(first) <= m(second)` up to tolerance, both defined.
    AtMost,
}

/// A pair of tables exhibiting a violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub first: ContingencyTable,
    pub second: ContingencyTable,
    pub relation: Relation,
}

impl Witness {
    pub fn new(first: ContingencyTable, second: ContingencyTable, relation: Relation) -> Self {
        Self {
            first,
            second,
            relation,
        }
    }

    pub fn holds_for(&self, x: f64, y: f64, tol: f64) -> bool {
        match self.relation {
            Relation::Differ => !same(x, y, tol),
            Relation::NotNegated => !same(y, -x, tol),
            Relation::Exceeds => above(x, y, tol),
            Relation::AtMost => !x.is_nan() && !y.is_nan() && !above(x, y, tol),
        }
    }

    /// Re-evaluates the measure on both tables from scratch.
    pub fn reproduce(
        &self,
        measure: u8,
        params: &MeasureParams,
        ctx: Option<&RuleContext>,
        tol: f64,
    ) -> bool {
        let x = evaluate_f64(measure, &self.first, params, ctx);
        let y = evaluate_f64(measure, &self.second, params, ctx);
        self.holds_for(x, y, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    #[test]
    fn sameness() {
        assert!(same(1.0, 1.0 + 1e-12, TOL));
        assert!(!same(1.0, 1.1, TOL));
        assert!(same(f64::NAN, f64::NAN, TOL));
        assert!(!same(f64::NAN, 0.0, TOL));
        assert!(same(f64::INFINITY, f64::INFINITY, TOL));
        assert!(!same(f64::INFINITY, f64::NEG_INFINITY, TOL));
        assert!(!same(f64::INFINITY, 1e300, TOL));
    }

    #[test]
    fn ordering() {
        assert!(above(1.0, 0.5, TOL));
        assert!(!above(1.0, 1.0 - 1e-12, TOL));
        assert!(above(f64::INFINITY, 3.0, TOL));
        assert!(!above(f64::INFINITY, f64::INFINITY, TOL));
        assert!(!above(f64::NAN, 0.0, TOL));
    }
}
