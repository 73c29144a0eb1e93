use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::resolve;

use super::evaluator::PropertyEngine;
use super::reference::ReferenceMatrix;
use super::{EvaluationConfig, Method, PropertyId, Verdict, PROPERTY_COUNT};

/// Measures × properties, one verdict per cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyMatrix {
    rows: Vec<MatrixRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixRow {
    pub measure: u8,
    pub verdicts: Vec<Verdict>,
}

impl PropertyMatrix {
    pub fn new(rows: Vec<MatrixRow>) -> Result<Self> {
        for r in &rows {
            if r.verdicts.len() != PROPERTY_COUNT
                || r.verdicts
                    .iter()
                    .zip(PropertyId::all())
                    .any(|(v, p)| v.property != p)
                || r.verdicts.iter().any(|v| v.measure != r.measure)
            {
                return Err(Error::InvalidArgument(format!(
                    "row for measure {} is not a P1..P19 sequence",
                    r.measure
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[MatrixRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn measures(&self) -> Vec<u8> {
        self.rows.iter().map(|r| r.measure).collect()
    }

    pub fn verdict(&self, measure: u8, p: PropertyId) -> Option<&Verdict> {
        self.rows
            .iter()
            .find(|r| r.measure == measure)
            .map(|r| &r.verdicts[usize::from(p.index()) - 1])
    }

    pub fn value(&self, measure: u8, p: PropertyId) -> Option<u8> {
        self.verdict(measure, p).and_then(|v| v.value)
    }

    /// Cells whose verdict is an error.
    pub fn gaps(&self) -> Vec<(u8, PropertyId)> {
        self.rows
            .iter()
            .flat_map(|r| r.verdicts.iter())
            .filter(|v| v.value.is_none())
            .map(|v| (v.measure, v.property))
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.gaps().is_empty()
    }

    /// The value vectors, failing on the first gap.
    pub fn value_rows(&self) -> Result<Vec<(u8, [u8; PROPERTY_COUNT])>> {
        self.rows
            .iter()
            .map(|r| {
                let mut out = [0u8; PROPERTY_COUNT];
                for (slot, v) in out.iter_mut().zip(&r.verdicts) {
                    *slot = v.value.ok_or_else(|| {
                        Error::InvalidArgument(format!(
                            "matrix cell ({}, {}) is undecided: {}",
                            v.measure,
                            v.property,
                            v.error.as_deref().unwrap_or("no value")
                        ))
                    })?;
                }
                Ok((r.measure, out))
            })
            .collect()
    }

    /// Rows restricted to the given measures, in the given order.
    pub fn select(&self, measures: &[u8]) -> Result<Self> {
        let by_id: BTreeMap<u8, &MatrixRow> = self.rows.iter().map(|r| (r.measure, r)).collect();
        let rows = measures
            .iter()
            .map(|m| {
                by_id
                    .get(m)
                    .map(|r| (*r).clone())
                    .ok_or_else(|| Error::UnknownMeasure(m.to_string()))
            })
            .collect::<Result<_>>()?;
        Ok(Self { rows })
    }

    /// Replaces computed cells by every published reference cell.
    pub fn completed_with(&self, reference: &ReferenceMatrix) -> Self {
        let mut out = self.clone();
        for row in &mut out.rows {
            for v in &mut row.verdicts {
                if let Some(cell) = reference.cell(v.measure, v.property) {
                    if v.value != Some(cell.value) {
                        v.note = Some(match v.value {
                            Some(c) => format!("computed {c}, replaced by published value"),
                            None => "undecided, replaced by published value".into(),
                        });
                        v.witness = None;
                        v.landmark = None;
                    }
                    v.value = Some(cell.value);
                    v.method = Method::Reference;
                    v.error = None;
                }
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("measure");
        for p in PropertyId::all() {
            let _ = write!(s, ",{p}");
        }
        s.push('\n');
        for r in &self.rows {
            let _ = write!(s, "{}", r.measure);
            for v in &r.verdicts {
                match v.value {
                    Some(x) => {
                        let _ = write!(s, ",{x}");
                    }
                    None => s.push(','),
                }
            }
            s.push('\n');
        }
        s
    }

    /// Reads `measure,P1,...,P19`; the measure column takes ids or names.
    pub fn from_csv(text: &str, method: Method) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() != PROPERTY_COUNT + 1
            || !cols[0].eq_ignore_ascii_case("measure")
            || cols[1..]
                .iter()
                .zip(PropertyId::all())
                .any(|(c, p)| c.parse::<PropertyId>().ok() != Some(p))
        {
            return Err(Error::Parse(format!("bad matrix header: {header}")));
        }
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != PROPERTY_COUNT + 1 {
                return Err(Error::Parse(format!(
                    "line {}: expected {} fields, got {}",
                    lineno + 2,
                    PROPERTY_COUNT + 1,
                    fields.len()
                )));
            }
            let measure = resolve(fields[0])?;
            let verdicts = PropertyId::all()
                .zip(&fields[1..])
                .map(|(p, f)| {
                    let mut v = Verdict::computed(measure, p, 0, 0);
                    v.method = method;
                    if f.is_empty() {
                        v.value = None;
                        v.error = Some("missing in input".into());
                    } else {
                        let x: u8 = f.parse().map_err(|_| {
                            Error::Parse(format!("line {}: bad value {f:?}", lineno + 2))
                        })?;
                        p.check_value(x)?;
                        v.value = Some(x);
                    }
                    Ok(v)
                })
                .collect::<Result<_>>()?;
            rows.push(MatrixRow { measure, verdicts });
        }
        Ok(Self { rows })
    }

    /// Every verdict, row-major, as a JSON array.
    pub fn to_json_detail(&self) -> Result<String> {
        let all: Vec<&Verdict> = self.rows.iter().flat_map(|r| &r.verdicts).collect();
        Ok(serde_json::to_string_pretty(&all)?)
    }
}

/// Decides every property for every listed measure.
pub fn build_matrix(measures: &[u8], cfg: &EvaluationConfig) -> Result<PropertyMatrix> {
    if measures.is_empty() {
        cfg.validate()?;
        return Ok(PropertyMatrix { rows: Vec::new() });
    }
    let engine = PropertyEngine::new(cfg.clone())?;
    let rows = measures
        .par_iter()
        .map(|&m| {
            Ok(MatrixRow {
                measure: m,
                verdicts: engine.evaluate_measure(m)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PropertyMatrix { rows })
}
