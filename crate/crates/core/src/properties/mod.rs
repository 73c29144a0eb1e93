//! Bounded decision of the 19 formal properties of a measure.
//!
//! Quantifiers over "all rules" range over every table with `n ≤ n_max`
//! whose four margins are non-empty; the bound is recorded in each verdict.

mod compare;
mod evaluator;
mod matrix;
mod reference;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::measures::MeasureParams;

pub use compare::{above, same, Relation, Witness};
pub use evaluator::{evaluate_property, PropertyEngine};
pub use matrix::{build_matrix, MatrixRow, PropertyMatrix};
pub use reference::{
    compare_to_reference, Discrepancy, DiscrepancyReport, ReferenceCell, ReferenceMatrix, Waiver,
};

pub const PROPERTY_COUNT: usize = 19;

/// One of P1..P19.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
pub struct PropertyId(u8);

impl PropertyId {
    pub fn new(i: u8) -> Result<Self> {
        if (1..=PROPERTY_COUNT as u8).contains(&i) {
            Ok(Self(i))
        } else {
            Err(Error::UnknownProperty(format!("P{i}")))
        }
    }

    pub fn all() -> impl Iterator<Item = PropertyId> {
        (1..=PROPERTY_COUNT as u8).map(PropertyId)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Number of admissible values: 3 for P12, 2 otherwise.
    pub fn arity(self) -> u8 {
        if self.0 == 12 {
            3
        } else {
            2
        }
    }

    pub fn check_value(self, v: u8) -> Result<()> {
        if v < self.arity() {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                property: self.to_string(),
                value: v,
            })
        }
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

impl Serialize for PropertyId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for PropertyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let digits = t.strip_prefix(['P', 'p']).unwrap_or(t);
        digits
            .parse::<u8>()
            .map_err(|_| Error::UnknownProperty(s.to_string()))
            .and_then(PropertyId::new)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationConfig {
    pub n_max: u64,
    pub tol: f64,
    pub min_conf: f64,
    pub k_max: u64,
    pub p19_scales: Vec<u64>,
    pub p19_dispersion_floor: f64,
    pub params: MeasureParams,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            n_max: 40,
            tol: 1e-9,
            min_conf: 0.5,
            k_max: 4,
            p19_scales: vec![1, 4, 16, 64, 256],
            p19_dispersion_floor: 1e-3,
            params: MeasureParams::default(),
        }
    }
}

impl EvaluationConfig {
    pub fn with_n_max(n_max: u64) -> Self {
        Self {
            n_max,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.n_max < 8 {
            return bad("n_max must be at least 8");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if !(self.min_conf > 0.0 && self.min_conf < 1.0) {
            return bad("min_conf must lie in (0, 1)");
        }
        if self.k_max < 2 {
            return bad("k_max must be at least 2");
        }
        if self.p19_scales.is_empty() || self.p19_scales.contains(&0) {
            return bad("p19_scales must be non-empty positive factors");
        }
        self.params.validate()
    }

    /// Largest P19 scale factor.
    pub fn p19_top_scale(&self) -> u64 {
        self.p19_scales.iter().copied().max().unwrap_or(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Computed,
    Declared,
    Reference,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Computed => "computed",
            Method::Declared => "declared",
            Method::Reference => "reference",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub measure: u8,
    pub property: PropertyId,
    /// `None` when the restriction set left nothing to decide on.
    pub value: Option<u8>,
    pub method: Method,
    pub bound: u64,
    pub witness: Option<Witness>,
    pub landmark: Option<f64>,
    pub error: Option<String>,
    pub note: Option<String>,
}

impl Verdict {
    pub(crate) fn computed(measure: u8, property: PropertyId, bound: u64, value: u8) -> Self {
        Self {
            measure,
            property,
            value: Some(value),
            method: Method::Computed,
            bound,
            witness: None,
            landmark: None,
            error: None,
            note: None,
        }
    }

    pub(crate) fn failed(measure: u8, property: PropertyId, bound: u64, msg: String) -> Self {
        Self {
            value: None,
            error: Some(msg),
            ..Self::computed(measure, property, bound, 0)
        }
    }

    pub(crate) fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn property_ids() {
        assert_eq!(PropertyId::all().count(), 19);
        assert_eq!("P12".parse::<PropertyId>().unwrap().arity(), 3);
        assert_eq!("7".parse::<PropertyId>().unwrap().to_string(), "P7");
        assert!("P20".parse::<PropertyId>().is_err());
        assert!(PropertyId::new(4).unwrap().check_value(2).is_err());
        assert!(PropertyId::new(12).unwrap().check_value(2).is_ok());
    }

    #[test]
    fn config_validation() {
        assert!(EvaluationConfig::default().validate().is_ok());
        assert!(EvaluationConfig::with_n_max(7).validate().is_err());
        let cfg = EvaluationConfig {
            min_conf: 1.0,
            ..EvaluationConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
