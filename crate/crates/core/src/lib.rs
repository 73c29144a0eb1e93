//! Objective interestingness measures for association rules, their formal
//! properties, and the clustering pipeline that groups measures by behavior.

pub mod analysis;
pub mod clustering;
pub mod contingency;
pub mod dedup;
pub mod error;
pub mod measures;
pub mod miner;
pub mod properties;
pub mod stats;

pub use contingency::{ContingencyTable, EnumerationConfig, RuleState, StateFilter, TransformKind};
pub use error::{Error, Result};
pub use measures::{MeasureParams, MeasureValue, RuleContext};
