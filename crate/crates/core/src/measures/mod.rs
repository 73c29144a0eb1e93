//! Registry and evaluation of the interestingness measures.

mod formulas;
mod registry;
mod value;
pub mod variants;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::contingency::{ContingencyTable, TransformKind};
use crate::error::{Error, Result};

pub use registry::{
    descriptor, registry, resolve, Codomain, MeasureDescriptor, Orientation, MEASURE_COUNT,
};
pub use value::MeasureValue;

pub(crate) use formulas::Cells;

pub const PDI_ID: u8 = 28;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureParams {
    pub sigma_c: f64,
    pub k_weight: u32,
    pub m_weight: u32,
}

impl Default for MeasureParams {
    fn default() -> Self {
        Self {
            sigma_c: 0.5,
            k_weight: 2,
            m_weight: 2,
        }
    }
}

impl MeasureParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.sigma_c) {
            return Err(Error::InvalidArgument(format!(
                "sigma_c must lie in [0, 1], got {}",
                self.sigma_c
            )));
        }
        if self.k_weight == 0 || self.m_weight == 0 {
            return Err(Error::InvalidArgument(
                "k_weight and m_weight must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A population of rules against which PDI centres and reduces II.
#[derive(Debug, Clone)]
pub struct RuleContext {
    tables: Vec<ContingencyTable>,
    ii_mean: f64,
    ii_sd: f64,
}

impl RuleContext {
    pub fn new(tables: Vec<ContingencyTable>) -> Result<Self> {
        let values: Vec<f64> = tables
            .iter()
            .filter_map(Cells::new)
            .map(|cl| formulas::intensity_of_implication(&cl))
            .filter(|v| !v.is_nan())
            .collect();
        if values.is_empty() {
            return Err(Error::InvalidArgument(
                "rule context needs at least one non-empty table".into(),
            ));
        }
        let len = values.len() as f64;
        let mean = values.iter().sum::<f64>() / len;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / len;
        Ok(Self {
            tables,
            ii_mean: mean,
            ii_sd: var.sqrt(),
        })
    }

    pub fn tables(&self) -> &[ContingencyTable] {
        &self.tables
    }

    pub fn ii_mean(&self) -> f64 {
        self.ii_mean
    }

    /// Population standard deviation of II over the context.
    pub fn ii_sd(&self) -> f64 {
        self.ii_sd
    }
}

/// Raw evaluation as an IEEE double, NaN meaning undefined. Empty tables and
/// PDI without a context give NaN.
pub fn evaluate_f64(
    id: u8,
    t: &ContingencyTable,
    params: &MeasureParams,
    ctx: Option<&RuleContext>,
) -> f64 {
    match Cells::new(t) {
        Some(cl) => formulas::eval(id, &cl, params, ctx),
        None => f64::NAN,
    }
}

pub fn evaluate(
    id: u8,
    t: &ContingencyTable,
    params: &MeasureParams,
    ctx: Option<&RuleContext>,
) -> Result<MeasureValue> {
    descriptor(id)?;
    if t.n() == 0 {
        return Err(Error::EmptyTable);
    }
    if id == PDI_ID && ctx.is_none() {
        return Err(Error::MissingContext(id));
    }
    Ok(MeasureValue::from_f64(evaluate_f64(id, t, params, ctx)))
}

/// One value per registry id; PDI is omitted without a context.
pub fn evaluate_all(
    t: &ContingencyTable,
    params: &MeasureParams,
    ctx: Option<&RuleContext>,
) -> Result<BTreeMap<u8, MeasureValue>> {
    let cl = Cells::new(t).ok_or(Error::EmptyTable)?;
    Ok(registry()
        .iter()
        .filter(|d| !(d.needs_context && ctx.is_none()))
        .map(|d| {
            (
                d.id,
                MeasureValue::from_f64(formulas::eval(d.id, &cl, params, ctx)),
            )
        })
        .collect())
}

/// First table, among `tables`, whose value changes when every count is
/// multiplied by some factor in `2..=k_max`. Undefined values compare equal
/// to each other.
pub fn uniform_scale_violation(
    id: u8,
    tables: &[ContingencyTable],
    k_max: u64,
    params: &MeasureParams,
    ctx: Option<&RuleContext>,
    tol: f64,
) -> Option<(ContingencyTable, u64)> {
    for t in tables {
        let x = evaluate_f64(id, t, params, ctx);
        for k in 2..=k_max {
            let Ok(s) = t.transform(TransformKind::UniformScale(k)) else {
                continue;
            };
            let y = evaluate_f64(id, &s, params, ctx);
            let agree = (x.is_nan() && y.is_nan())
                || x == y
                || (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0);
            if !agree {
                return Some((*t, k));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: i64, b: i64, c: i64, d: i64) -> ContingencyTable {
        ContingencyTable::new(a, b, c, d).unwrap()
    }

    fn val(id: u8, table: &ContingencyTable) -> f64 {
        evaluate(id, table, &MeasureParams::default(), None)
            .unwrap()
            .to_f64()
    }

    #[test]
    fn hand_arithmetic() {
        let base = t(40, 10, 20, 30);
        assert!((val(3, &base) - 0.8).abs() < 1e-12);
        assert!((val(54, &base) - 0.4).abs() < 1e-12);
        assert!((val(34, &base) - 4.0 / 3.0).abs() < 1e-12);
        assert!((val(48, &base) - 5.0 / 7.0).abs() < 1e-12);
        assert!((val(45, &base) - 10.0).abs() < 1e-9);
        assert!((val(35, &base) - 4.0 / 7.0).abs() < 1e-12);
        // (0.4 - 0.3) / max(0.4*0.4, 0.6*0.1)
        assert!((val(61, &base) - 0.625).abs() < 1e-12);
        assert!((val(39, &base) - 41.0 / 52.0).abs() < 1e-12);
    }

    #[test]
    fn independence_landmarks() {
        let ind = t(30, 20, 30, 20);
        assert!((val(34, &ind) - 1.0).abs() < 1e-12);
        assert!(val(1, &ind).abs() < 1e-12);
        assert!(val(18, &ind).abs() < 1e-12);
    }

    #[test]
    fn implication_edges() {
        let imp = t(50, 0, 10, 40);
        assert_eq!(
            evaluate(10, &imp, &MeasureParams::default(), None).unwrap(),
            MeasureValue::PosInf
        );
        assert!((val(18, &imp) - 1.0).abs() < 1e-12);
        assert_eq!(val(30, &imp), 1.0);
    }

    #[test]
    fn empty_premise() {
        let table = t(0, 0, 30, 70);
        let all = evaluate_all(&table, &MeasureParams::default(), None).unwrap();
        assert_eq!(all[&3], MeasureValue::Undefined);
        assert_eq!(all[&47], MeasureValue::Finite(0.3));
        assert!(!all.contains_key(&PDI_ID));
        assert_eq!(all.len(), 60);
    }

    #[test]
    fn batch_on_reference_table() {
        let all = evaluate_all(&t(40, 10, 20, 30), &MeasureParams::default(), None).unwrap();
        assert_eq!(all.len(), 60);
        assert!(all.values().all(|v| v.finite().is_some()));
    }

    #[test]
    fn pdi_needs_context() {
        let table = t(40, 10, 20, 30);
        assert_eq!(
            evaluate(PDI_ID, &table, &MeasureParams::default(), None),
            Err(Error::MissingContext(PDI_ID))
        );
        let ctx = RuleContext::new(vec![table, t(5, 20, 10, 65), t(30, 2, 30, 38)]).unwrap();
        let v = evaluate(PDI_ID, &table, &MeasureParams::default(), Some(&ctx)).unwrap();
        assert!(v.finite().is_some());
        let flat = RuleContext::new(vec![table]).unwrap();
        assert_eq!(
            evaluate(PDI_ID, &table, &MeasureParams::default(), Some(&flat)).unwrap(),
            MeasureValue::Undefined
        );
    }

    #[test]
    fn frequency_measures_are_scale_invariant() {
        let base = t(7, 3, 11, 19);
        let scaled = base.transform(TransformKind::UniformScale(3)).unwrap();
        for d in registry() {
            if d.uses_counts || d.needs_context {
                continue;
            }
            let (x, y) = (val(d.id, &base), val(d.id, &scaled));
            assert!(
                x.to_bits() == y.to_bits(),
                "measure {} differs: {x} vs {y}",
                d.id
            );
        }
    }

    #[test]
    fn params_validation() {
        assert!(MeasureParams::default().validate().is_ok());
        let bad = MeasureParams {
            sigma_c: 1.5,
            ..MeasureParams::default()
        };
        assert!(bad.validate().is_err());
    }
}
