//! Literature formulas that the registry folds into one entry.
//!
//! Each alias is written the way its own source states it, so the
//! extensional comparison is between genuinely different expressions.

use serde::Serialize;

use crate::contingency::ContingencyTable;

use super::value::div;
use super::{evaluate_f64, registry, MeasureParams, RuleContext};

type CellFn = fn(f64, f64, f64, f64) -> f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FormulaKey {
    pub measure: u8,
    /// 0 for the registry formula.
    pub variant: u8,
}

#[derive(Debug, Clone, Copy)]
pub struct FormulaVariant {
    pub key: FormulaKey,
    pub name: &'static str,
    alt: Option<CellFn>,
}

impl FormulaVariant {
    pub fn evaluate(
        &self,
        t: &ContingencyTable,
        params: &MeasureParams,
        ctx: Option<&RuleContext>,
    ) -> f64 {
        match self.alt {
            None => evaluate_f64(self.key.measure, t, params, ctx),
            Some(f) => {
                if t.n() == 0 {
                    return f64::NAN;
                }
                let [a, b, c, d] = t.cells();
                f(a as f64, b as f64, c as f64, d as f64)
            }
        }
    }
}

fn phi(a: f64, b: f64, c: f64, d: f64) -> f64 {
    div(
        a * d - b * c,
        ((a + b) * (c + d) * (a + c) * (b + d)).sqrt(),
    )
}

fn kappa(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let n = a + b + c + d;
    let observed = (a + d) / n;
    let expected = ((a + b) * (a + c) + (c + d) * (b + d)) / (n * n);
    div(observed - expected, 1.0 - expected)
}

fn centred_confidence(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let n = a + b + c + d;
    div(a, a + b) - (a + c) / n
}

fn added_value(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let n = a + b + c + d;
    div(n * a - (a + b) * (a + c), n * (a + b))
}

fn ganascia(a: f64, b: f64, _c: f64, _d: f64) -> f64 {
    div(2.0 * a, a + b) - 1.0
}

fn ochiai(a: f64, b: f64, c: f64, _d: f64) -> f64 {
    div(a, ((a + b) * (a + c)).sqrt())
}

fn f_measure(a: f64, b: f64, c: f64, _d: f64) -> f64 {
    div(2.0 * a, (a + b) + (a + c))
}

fn odd_multiplier(a: f64, b: f64, c: f64, d: f64) -> f64 {
    div(a * (b + d), b * (a + c))
}

fn loevinger(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let n = a + b + c + d;
    1.0 - div(b / n, ((a + b) / n) * ((b + d) / n))
}

fn satisfaction(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let n = a + b + c + d;
    let p_ny = (b + d) / n;
    div(p_ny - div(b, a + b), p_ny)
}

fn agreement_disagreement(a: f64, b: f64, c: f64, _d: f64) -> f64 {
    div(a, b + c)
}

fn russel_rao(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a / (a + b + c + d)
}

fn causal_support(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let n = a + b + c + d;
    (a + b) / n + (b + d) / n - 2.0 * b / n
}

const ALIASES: [(u8, u8, &str, CellFn); 13] = [
    (1, 1, "phi-coefficient", phi),
    (2, 1, "Kappa", kappa),
    (5, 1, "Centred confidence", centred_confidence),
    (5, 2, "Added value", added_value),
    (6, 1, "Ganascia", ganascia),
    (11, 1, "Ochiai", ochiai),
    (13, 1, "F-measure", f_measure),
    (17, 1, "Odd multiplier", odd_multiplier),
    (18, 1, "Loevinger", loevinger),
    (18, 2, "Satisfaction", satisfaction),
    (
        38,
        1,
        "Agreement and disagreement index",
        agreement_disagreement,
    ),
    (54, 1, "Russel and Rao index", russel_rao),
    (46, 1, "Causal support", causal_support),
];

/// The registry formulas followed by the alias formulas, ordered by key.
pub fn formula_variants() -> Vec<FormulaVariant> {
    let mut out: Vec<FormulaVariant> = registry()
        .iter()
        .map(|d| FormulaVariant {
            key: FormulaKey {
                measure: d.id,
                variant: 0,
            },
            name: d.canonical_name,
            alt: None,
        })
        .collect();
    out.extend(
        ALIASES
            .iter()
            .map(|&(measure, variant, name, f)| FormulaVariant {
                key: FormulaKey { measure, variant },
                name,
                alt: Some(f),
            }),
    );
    out.sort_by_key(|v| v.key);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventy_four_formulas() {
        let all = formula_variants();
        assert_eq!(all.len(), 74);
        let mut keys: Vec<_> = all.iter().map(|v| v.key).collect();
        keys.dedup();
        assert_eq!(keys.len(), 74);
    }

    #[test]
    fn aliases_agree_on_a_table() {
        let t = ContingencyTable::new(13, 4, 9, 21).unwrap();
        let params = MeasureParams::default();
        for v in formula_variants().iter().filter(|v| v.key.variant > 0) {
            let canonical = evaluate_f64(v.key.measure, &t, &params, None);
            let alt = v.evaluate(&t, &params, None);
            assert!(
                (canonical - alt).abs() < 1e-12,
                "{}: {canonical} vs {alt}",
                v.name
            );
        }
    }
}
