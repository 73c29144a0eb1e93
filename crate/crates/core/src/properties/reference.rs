use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::resolve;

use super::matrix::PropertyMatrix;
use super::PropertyId;

const BUILTIN_CELLS: &str = include_str!("../../data/reference.csv");
const BUILTIN_WAIVERS: &str = include_str!("../../data/waivers.csv");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReferenceCell {
    pub measure: u8,
    pub property: PropertyId,
    pub value: u8,
    /// Which published table the cell comes from.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Waiver {
    pub measure: u8,
    pub property: PropertyId,
    pub justification: String,
}

/// Published cells plus the waived ones.
#[derive(Debug, Clone, Default)]
pub struct ReferenceMatrix {
    cells: BTreeMap<(u8, PropertyId), ReferenceCell>,
    waivers: BTreeMap<(u8, PropertyId), Waiver>,
}

impl ReferenceMatrix {
    /// The cells shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_csv(BUILTIN_CELLS, BUILTIN_WAIVERS).expect("bundled reference data parses")
    }

    pub fn from_files(cells: &Path, waivers: Option<&Path>) -> Result<Self> {
        let c = std::fs::read_to_string(cells)?;
        let w = match waivers {
            Some(p) => std::fs::read_to_string(p)?,
            None => String::from("measure,property,justification\n"),
        };
        Self::from_csv(&c, &w)
    }

    /// `measure,property,value,source` and `measure,property,justification`.
    pub fn from_csv(cells: &str, waivers: &str) -> Result<Self> {
        let mut out = Self::default();
        for (lineno, rec) in records(cells, &["measure", "property", "value", "source"])? {
            let measure = resolve(&rec[0])?;
            let property: PropertyId = rec[1].parse()?;
            let value: u8 = rec[2]
                .parse()
                .map_err(|_| Error::Parse(format!("reference line {lineno}: bad value")))?;
            property.check_value(value)?;
            let cell = ReferenceCell {
                measure,
                property,
                value,
                source: rec[3].clone(),
            };
            if let Some(prev) = out.cells.insert((measure, property), cell) {
                if prev.value != value {
                    return Err(Error::Parse(format!(
                        "reference line {lineno}: conflicting value for ({measure}, {property})"
                    )));
                }
            }
        }
        for (lineno, rec) in records(waivers, &["measure", "property", "justification"])? {
            let measure = resolve(&rec[0])?;
            let property: PropertyId = rec[1].parse()?;
            if !out.cells.contains_key(&(measure, property)) {
                return Err(Error::Parse(format!(
                    "waiver line {lineno}: ({measure}, {property}) is not a reference cell"
                )));
            }
            if rec[2].trim().is_empty() {
                return Err(Error::Parse(format!(
                    "waiver line {lineno}: missing justification"
                )));
            }
            out.waivers.insert(
                (measure, property),
                Waiver {
                    measure,
                    property,
                    justification: rec[2].clone(),
                },
            );
        }
        Ok(out)
    }

    pub fn cell(&self, measure: u8, p: PropertyId) -> Option<&ReferenceCell> {
        self.cells.get(&(measure, p))
    }

    pub fn cells(&self) -> impl Iterator<Item = &ReferenceCell> {
        self.cells.values()
    }

    pub fn waiver(&self, measure: u8, p: PropertyId) -> Option<&Waiver> {
        self.waivers.get(&(measure, p))
    }

    pub fn waivers(&self) -> impl Iterator<Item = &Waiver> {
        self.waivers.values()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub measure: u8,
    pub property: PropertyId,
    pub reference: u8,
    /// `None` when the evaluator produced an error verdict.
    pub computed: Option<u8>,
    pub source: String,
    pub justification: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DiscrepancyReport {
    pub checked: usize,
    pub waived: Vec<Discrepancy>,
    pub unexplained: Vec<Discrepancy>,
    /// Waivers whose cell now agrees.
    pub stale_waivers: Vec<(u8, PropertyId)>,
}

impl DiscrepancyReport {
    pub fn is_clean(&self) -> bool {
        self.unexplained.is_empty()
    }
}

/// Every reference cell whose measure is in the matrix is checked.
pub fn compare_to_reference(
    matrix: &PropertyMatrix,
    reference: &ReferenceMatrix,
) -> Result<DiscrepancyReport> {
    let mut report = DiscrepancyReport::default();
    let present = matrix.measures();
    for m in &present {
        crate::measures::descriptor(*m)?;
    }
    for cell in reference.cells().filter(|c| present.contains(&c.measure)) {
        report.checked += 1;
        let computed = matrix.value(cell.measure, cell.property);
        let waiver = reference.waiver(cell.measure, cell.property);
        if computed == Some(cell.value) {
            if waiver.is_some() {
                report.stale_waivers.push((cell.measure, cell.property));
            }
            continue;
        }
        let d = Discrepancy {
            measure: cell.measure,
            property: cell.property,
            reference: cell.value,
            computed,
            source: cell.source.clone(),
            justification: waiver.map(|w| w.justification.clone()),
        };
        if waiver.is_some() {
            report.waived.push(d);
        } else {
            report.unexplained.push(d);
        }
    }
    Ok(report)
}

/// Minimal CSV with double-quoted fields, header checked against `expected`.
fn records(text: &str, expected: &[&str]) -> Result<Vec<(usize, Vec<String>)>> {
    let mut out = Vec::new();
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields =
            split_csv_line(line).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        if !header_seen {
            let names: Vec<String> = fields.iter().map(|f| f.trim().to_lowercase()).collect();
            if names != expected {
                return Err(Error::Parse(format!(
                    "expected header {}, got {line}",
                    expected.join(",")
                )));
            }
            header_seen = true;
            continue;
        }
        if fields.len() != expected.len() {
            return Err(Error::Parse(format!(
                "line {}: expected {} fields, got {}",
                i + 1,
                expected.len(),
                fields.len()
            )));
        }
        out.push((
            i + 1,
            fields.into_iter().map(|f| f.trim().to_string()).collect(),
        ));
    }
    Ok(out)
}

fn split_csv_line(line: &str) -> std::result::Result<Vec<String>, String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut chars = line.chars().peekable();
    let mut quoted = false;
    while let Some(ch) = chars.next() {
        match (quoted, ch) {
            (true, '"') if chars.peek() == Some(&'"') => {
                chars.next();
                cur.push('"');
            }
            (true, '"') => quoted = false,
            (true, _) => cur.push(ch),
            (false, '"') if cur.trim().is_empty() => {
                cur.clear();
                quoted = true;
            }
            (false, ',') => fields.push(std::mem::take(&mut cur)),
            (false, _) => cur.push(ch),
        }
    }
    if quoted {
        return Err("unterminated quote".into());
    }
    fields.push(cur);
    Ok(fields)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_loads() {
        let r = ReferenceMatrix::builtin();
        // 61 P1 cells, 11 full columns minus the P1 cells they share
        assert_eq!(r.len(), 61 + 11 * 18);
        assert_eq!(r.cell(54, PropertyId::new(4).unwrap()).unwrap().value, 0);
        assert!(r.waiver(54, PropertyId::new(4).unwrap()).is_some());
    }

    #[test]
    fn waiver_must_cite_a_cell() {
        let cells = "measure,property,value,source\n3,P1,1,t\n";
        let bad = "measure,property,justification\n3,P2,\"no such cell\"\n";
        assert!(ReferenceMatrix::from_csv(cells, bad).is_err());
        let good = "measure,property,justification\n3,P1,\"quoted, with comma\"\n";
        let r = ReferenceMatrix::from_csv(cells, good).unwrap();
        assert_eq!(
            r.waiver(3, PropertyId::new(1).unwrap())
                .unwrap()
                .justification,
            "quoted, with comma"
        );
    }

    #[test]
    fn quoted_fields() {
        assert_eq!(
            split_csv_line(r#"1,"a ""b"", c",x"#).unwrap(),
            ["1", r#"a "b", c"#, "x"]
        );
        assert!(split_csv_line(r#"1,"open"#).is_err());
    }
}
