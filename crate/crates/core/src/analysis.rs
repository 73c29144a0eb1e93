//! Evolution curves along the number of examples, landmark values and
//! class profiles.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use serde::{Serialize, Serializer};

use crate::clustering::Partition;
use crate::contingency::ContingencyTable;
use crate::error::{Error, Result};
use crate::measures::{evaluate, resolve, MeasureParams, MeasureValue, RuleContext};
use crate::properties::{PropertyId, PropertyMatrix, PROPERTY_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LandmarkState {
    Incompatibility,
    Independence,
    Equilibrium,
    Implication,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Landmark {
    pub state: LandmarkState,
    pub n_xy: u64,
    /// False for the two integers bracketing a fractional independence point.
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub n_xy: u64,
    pub value: MeasureValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSeries {
    pub measure: u8,
    pub n_x: u64,
    pub n_y: u64,
    pub n: u64,
    pub points: Vec<CurvePoint>,
    pub landmarks: Vec<Landmark>,
}

impl CurveSeries {
    pub fn value_at(&self, n_xy: u64) -> Option<MeasureValue> {
        self.points.iter().find(|p| p.n_xy == n_xy).map(|p| p.value)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n_xy,value\n");
        for p in &self.points {
            let _ = writeln!(s, "{},{}", p.n_xy, p.value);
        }
        s
    }
}

/// The table with margins `(n_x, n_y, n)` and `n_xy` examples.
pub fn table_at(n_x: u64, n_y: u64, n: u64, n_xy: u64) -> Result<ContingencyTable> {
    let cells = [
        n_xy as i64,
        n_x as i64 - n_xy as i64,
        n_y as i64 - n_xy as i64,
        n as i64 - n_x as i64 - n_y as i64 + n_xy as i64,
    ];
    ContingencyTable::new(cells[0], cells[1], cells[2], cells[3])
}

fn check_margins(n_x: u64, n_y: u64, n: u64) -> Result<()> {
    if n == 0 || n_x > n_y || n_y > n {
        return Err(Error::InvalidArgument(format!(
            "curve margins need n_x <= n_y <= n and n >= 1, got ({n_x}, {n_y}, {n})"
        )));
    }
    Ok(())
}

fn landmarks(n_x: u64, n_y: u64, n: u64) -> Vec<Landmark> {
    let lo = (n_x + n_y).saturating_sub(n);
    let hi = n_x.min(n_y);
    let mut out = Vec::new();
    let mut push = |state, n_xy, exact| {
        if (lo..=hi).contains(&n_xy) {
            out.push(Landmark { state, n_xy, exact });
        }
    };
    push(LandmarkState::Incompatibility, 0, true);
    let prod = n_x * n_y;
    if prod.is_multiple_of(n) {
        push(LandmarkState::Independence, prod / n, true);
    } else {
        push(LandmarkState::Independence, prod / n, false);
        push(LandmarkState::Independence, prod / n + 1, false);
    }
    if n_x.is_multiple_of(2) {
        push(LandmarkState::Equilibrium, n_x / 2, true);
    }
    if n_x > 0 {
        push(LandmarkState::Implication, n_x, true);
    }
    out
}

/// The measure at every feasible `n_xy` with the margins held fixed.
pub fn curve(
    measure: u8,
    n_x: u64,
    n_y: u64,
    n: u64,
    params: &MeasureParams,
    ctx: Option<&RuleContext>,
) -> Result<CurveSeries> {
    check_margins(n_x, n_y, n)?;
    let lo = (n_x + n_y).saturating_sub(n);
    let hi = n_x.min(n_y);
    let points = (lo..=hi)
        .map(|a| {
            let t = table_at(n_x, n_y, n, a)?;
            Ok(CurvePoint {
                n_xy: a,
                value: evaluate(measure, &t, params, ctx)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(CurveSeries {
        measure,
        n_x,
        n_y,
        n,
        points,
        landmarks: landmarks(n_x, n_y, n),
    })
}

/// Values at the exactly representable landmarks.
pub fn landmark_values(
    measure: u8,
    n_x: u64,
    n_y: u64,
    n: u64,
    params: &MeasureParams,
    ctx: Option<&RuleContext>,
) -> Result<BTreeMap<LandmarkState, MeasureValue>> {
    check_margins(n_x, n_y, n)?;
    landmarks(n_x, n_y, n)
        .into_iter()
        .filter(|l| l.exact)
        .map(|l| {
            let t = table_at(n_x, n_y, n, l.n_xy)?;
            Ok((l.state, evaluate(measure, &t, params, ctx)?))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Linear,
    Concave,
    Convex,
    Mixed,
}

/// Classifies the second differences over runs of consecutive finite points.
pub fn shape_probe(series: &CurveSeries, tol: f64) -> Result<Shape> {
    let finite: Vec<(u64, f64)> = series
        .points
        .iter()
        .filter_map(|p| p.value.finite().map(|v| (p.n_xy, v)))
        .collect();
    if finite.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "shape probe needs three finite points, measure {} has {}",
            series.measure,
            finite.len()
        )));
    }
    let (mut concave, mut convex) = (true, true);
    for w in finite.windows(3) {
        if w[1].0 != w[0].0 + 1 || w[2].0 != w[1].0 + 1 {
            continue;
        }
        let d2 = w[2].1 - 2.0 * w[1].1 + w[0].1;
        concave &= d2 <= tol;
        convex &= d2 >= -tol;
    }
    Ok(match (concave, convex) {
        (true, true) => Shape::Linear,
        (true, false) => Shape::Concave,
        (false, true) => Shape::Convex,
        (false, false) => Shape::Mixed,
    })
}

/// One summary cell: unanimous, all but one, or split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileCell {
    Value(u8),
    Majority(u8),
    Unknown,
}

impl fmt::Display for ProfileCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileCell::Value(v) => write!(f, "{v}"),
            ProfileCell::Majority(v) => write!(f, "{v}?"),
            ProfileCell::Unknown => f.write_str("?"),
        }
    }
}

impl std::str::FromStr for ProfileCell {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "?" {
            return Ok(ProfileCell::Unknown);
        }
        let (digits, majority) = match s.strip_suffix('?') {
            Some(d) => (d, true),
            None => (s, false),
        };
        let v: u8 = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad profile token {s:?}")))?;
        Ok(if majority {
            ProfileCell::Majority(v)
        } else {
            ProfileCell::Value(v)
        })
    }
}

impl Serialize for ProfileCell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn summarize(values: &[u8]) -> ProfileCell {
    let mut counts: BTreeMap<u8, usize> = BTreeMap::new();
    for &v in values {
        *counts.entry(v).or_default() += 1;
    }
    match counts.len() {
        0 => ProfileCell::Unknown,
        1 => ProfileCell::Value(values[0]),
        _ => {
            let top = counts.iter().find(|(_, &c)| c + 1 == values.len());
            match top {
                Some((&v, _)) if values.len() >= 3 => ProfileCell::Majority(v),
                _ => ProfileCell::Unknown,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassProfile {
    pub class: usize,
    pub members: Vec<u8>,
    pub cells: Vec<ProfileCell>,
}

/// One profile per cluster label, in label order.
pub fn class_profile(matrix: &PropertyMatrix, partition: &Partition) -> Result<Vec<ClassProfile>> {
    let rows: BTreeMap<u8, [u8; PROPERTY_COUNT]> = matrix.value_rows()?.into_iter().collect();
    partition
        .clusters()
        .into_iter()
        .enumerate()
        .map(|(i, members)| {
            let vectors = members
                .iter()
                .map(|m| {
                    rows.get(m)
                        .ok_or_else(|| Error::UnknownMeasure(m.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            let cells = (0..PROPERTY_COUNT)
                .map(|p| summarize(&vectors.iter().map(|r| r[p]).collect::<Vec<_>>()))
                .collect();
            Ok(ClassProfile {
                class: i + 1,
                members,
                cells,
            })
        })
        .collect()
}

/// Properties as rows, classes as columns.
pub fn profiles_to_csv(profiles: &[ClassProfile]) -> String {
    let mut s = String::from("property");
    for p in profiles {
        let _ = write!(s, ",C{}", p.class);
    }
    s.push('\n');
    for (i, prop) in PropertyId::all().enumerate() {
        let _ = write!(s, "{prop}");
        for p in profiles {
            let _ = write!(s, ",{}", p.cells[i]);
        }
        s.push('\n');
    }
    s
}

/// The seven class profiles as published, property-major.
pub const PUBLISHED_CLASS_PROFILES: [[&str; 7]; PROPERTY_COUNT] = [
    ["?", "1", "1", "?", "1", "?", "?"],
    ["1", "1", "?", "1", "1", "1", "1"],
    ["1", "1", "0?", "?", "?", "1", "?"],
    ["1", "1", "0", "1?", "1", "1", "?"],
    ["1", "0?", "0", "?", "0", "1", "1"],
    ["1", "1?", "0", "1?", "0", "0", "1?"],
    ["1", "0", "?", "0", "0", "1", "1"],
    ["0", "0", "0", "?", "?", "1", "0?"],
    ["0", "?", "0", "0", "1", "0", "0"],
    ["1", "0", "0?", "0", "0", "1", "1"],
    ["1", "0", "0", "0", "0", "1", "1"],
    ["2", "2", "?", "?", "?", "?", "?"],
    ["?", "0?", "0", "0", "0", "?", "0?"],
    ["0", "0", "0", "0", "0", "?", "0"],
    ["0", "0", "0", "0", "?", "1", "0?"],
    ["0", "0", "?", "0?", "0", "?", "0"],
    ["1", "1", "0", "0", "0", "0", "0"],
    ["1", "1", "0?", "0", "0", "0", "0"],
    ["0", "1?", "?", "1", "1?", "1", "1"],
];

/// Members named for the two classes studied in detail.
pub const PUBLISHED_C4_MEMBERS: [&str; 13] = [
    "Accuracy",
    "Jaccard",
    "Support",
    "Cosine",
    "Recall",
    "Causal dependency",
    "Causal confidence",
    "Causal-confirm confidence",
    "Negative reliability",
    "Leverage",
    "Specificity",
    "Czekanowski-Dice",
    "Kulczynski",
];

pub const PUBLISHED_C6_MEMBERS: [&str; 5] = ["Zhang", "MGK", "Yule's Y", "Yule's Q", "Goodman"];

pub fn resolve_all(names: &[&str]) -> Result<Vec<u8>> {
    names.iter().map(|n| resolve(n)).collect()
}

/// Published profile of class `c` (1-based).
pub fn published_profile(c: usize) -> Result<Vec<ProfileCell>> {
    if !(1..=7).contains(&c) {
        return Err(Error::InvalidArgument(format!("no published class C{c}")));
    }
    PUBLISHED_CLASS_PROFILES
        .iter()
        .map(|row| row[c - 1].parse())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::properties::Method;

    fn params() -> MeasureParams {
        MeasureParams::default()
    }

    #[test]
    fn curve_covers_feasible_range() {
        let s = curve(54, 174, 400, 600, &params(), None).unwrap();
        assert_eq!(s.points.len(), 175);
        assert_eq!(s.points[0].n_xy, 0);
        let states: Vec<_> = s.landmarks.iter().map(|l| (l.state, l.n_xy)).collect();
        assert_eq!(
            states,
            vec![
                (LandmarkState::Incompatibility, 0),
                (LandmarkState::Independence, 116),
                (LandmarkState::Equilibrium, 87),
                (LandmarkState::Implication, 174),
            ]
        );
        for l in &s.landmarks {
            let st = table_at(174, 400, 600, l.n_xy)
                .unwrap()
                .classify_state()
                .unwrap();
            match l.state {
                LandmarkState::Incompatibility => assert!(st.incompatibility),
                LandmarkState::Independence => assert!(st.independence),
                LandmarkState::Equilibrium => assert!(st.equilibrium),
                LandmarkState::Implication => assert!(st.logical_implication),
            }
        }
    }

    #[test]
    fn lower_bound_of_range() {
        let s = curve(3, 5, 8, 10, &params(), None).unwrap();
        assert_eq!(s.points.first().unwrap().n_xy, 3);
        assert!(s
            .landmarks
            .iter()
            .all(|l| l.state != LandmarkState::Incompatibility));
    }

    #[test]
    fn fractional_independence_is_bracketed() {
        let s = curve(34, 3, 5, 7, &params(), None).unwrap();
        let ind: Vec<_> = s
            .landmarks
            .iter()
            .filter(|l| l.state == LandmarkState::Independence)
            .collect();
        assert_eq!(ind.len(), 2);
        assert!(ind.iter().all(|l| !l.exact));
        let lv = landmark_values(34, 3, 5, 7, &params(), None).unwrap();
        assert!(!lv.contains_key(&LandmarkState::Independence));
    }

    #[test]
    fn rejects_bad_margins() {
        assert!(curve(3, 5, 4, 10, &params(), None).is_err());
        assert!(curve(3, 5, 8, 7, &params(), None).is_err());
        assert!(curve(3, 0, 0, 0, &params(), None).is_err());
    }

    #[test]
    fn lift_and_mgk_landmarks() {
        let lift = landmark_values(34, 174, 400, 600, &params(), None).unwrap();
        assert!((lift[&LandmarkState::Independence].finite().unwrap() - 1.0).abs() < 1e-12);
        let mgk = landmark_values(41, 174, 400, 600, &params(), None).unwrap();
        assert!(mgk[&LandmarkState::Independence].finite().unwrap().abs() < 1e-12);
        let q = landmark_values(48, 174, 400, 600, &params(), None).unwrap();
        assert!((q[&LandmarkState::Implication].finite().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shapes() {
        let support = curve(54, 174, 400, 600, &params(), None).unwrap();
        assert_eq!(shape_probe(&support, 1e-9).unwrap(), Shape::Linear);
        let jaccard = curve(35, 174, 400, 600, &params(), None).unwrap();
        assert_eq!(shape_probe(&jaccard, 1e-9).unwrap(), Shape::Convex);
        let mut flat = support.clone();
        for p in &mut flat.points {
            p.value = MeasureValue::Finite(0.25);
        }
        assert_eq!(shape_probe(&flat, 1e-9).unwrap(), Shape::Linear);
        flat.points.truncate(2);
        assert!(shape_probe(&flat, 1e-9).is_err());
    }

    #[test]
    fn summary_tokens() {
        assert_eq!(summarize(&[1, 1, 1]), ProfileCell::Value(1));
        assert_eq!(summarize(&[1, 0, 1]), ProfileCell::Majority(1));
        assert_eq!(summarize(&[1, 0]), ProfileCell::Unknown);
        assert_eq!(summarize(&[2, 2, 0, 1]), ProfileCell::Unknown);
        assert_eq!(summarize(&[2, 2, 2, 0]), ProfileCell::Majority(2));
        assert_eq!(summarize(&[0]), ProfileCell::Value(0));
        for tok in ["0", "1", "2", "0?", "1?", "?"] {
            assert_eq!(tok.parse::<ProfileCell>().unwrap().to_string(), tok);
        }
    }

    #[test]
    fn published_profiles_parse() {
        for c in 1..=7 {
            assert_eq!(published_profile(c).unwrap().len(), PROPERTY_COUNT);
        }
        assert!(published_profile(8).is_err());
        assert_eq!(resolve_all(&PUBLISHED_C4_MEMBERS).unwrap().len(), 13);
    }

    #[test]
    fn profile_csv_layout() {
        let mut text = String::from("measure");
        for p in PropertyId::all() {
            text.push_str(&format!(",{p}"));
        }
        text.push_str("\n3,1,1,1,1,0,0,0,1,1,0,0,1,0,0,0,0,0,0,1\n");
        text.push_str("54,0,1,0,1,0,0,0,0,0,0,0,1,0,0,0,0,0,0,1\n");
        let m = PropertyMatrix::from_csv(&text, Method::Computed).unwrap();
        let p = Partition::from_keys(vec![3, 54], &[0, 0]);
        let prof = class_profile(&m, &p).unwrap();
        let csv = profiles_to_csv(&prof);
        assert!(csv.starts_with("property,C1\nP1,?\nP2,1\n"));
    }
}
