//! 2×2 contingency tables of a rule `X → Y`.
//!
//! A table holds the four joint counts `(n_xy, n_xny, n_nxy, n_nxny)`:
//! examples, counter-examples, `Y` without `X`, and neither. Every measure
//! and every property in this crate is a function of these four numbers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContingencyTable {
    n_xy: u64,
    n_xny: u64,
    n_nxy: u64,
    n_nxny: u64,
}

/// Joint and marginal frequencies of a non-empty table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probabilities {
    pub xy: f64,
    pub xny: f64,
    pub nxy: f64,
    pub nxny: f64,
    pub x: f64,
    pub y: f64,
    pub nx: f64,
    pub ny: f64,
}

impl ContingencyTable {
    pub fn new(n_xy: i64, n_xny: i64, n_nxy: i64, n_nxny: i64) -> Result<Self> {
        for c in [n_xy, n_xny, n_nxy, n_nxny] {
            if c < 0 {
                return Err(Error::NegativeCount(c));
            }
        }
        Ok(Self::from_counts([
            n_xy as u64,
            n_xny as u64,
            n_nxy as u64,
            n_nxny as u64,
        ]))
    }

    /// Cells in `(n_xy, n_xny, n_nxy, n_nxny)` order.
    pub const fn from_counts(cells: [u64; 4]) -> Self {
        Self {
            n_xy: cells[0],
            n_xny: cells[1],
            n_nxy: cells[2],
            n_nxny: cells[3],
        }
    }

    pub const fn cells(&self) -> [u64; 4] {
        [self.n_xy, self.n_xny, self.n_nxy, self.n_nxny]
    }

    pub const fn n_xy(&self) -> u64 {
        self.n_xy
    }
    pub const fn n_xny(&self) -> u64 {
        self.n_xny
    }
    pub const fn n_nxy(&self) -> u64 {
        self.n_nxy
    }
    pub const fn n_nxny(&self) -> u64 {
        self.n_nxny
    }
    pub const fn n(&self) -> u64 {
        self.n_xy + self.n_xny + self.n_nxy + self.n_nxny
    }
    pub const fn n_x(&self) -> u64 {
        self.n_xy + self.n_xny
    }
    pub const fn n_y(&self) -> u64 {
        self.n_xy + self.n_nxy
    }
    pub const fn n_nx(&self) -> u64 {
        self.n_nxy + self.n_nxny
    }
    pub const fn n_ny(&self) -> u64 {
        self.n_xny + self.n_nxny
    }

    /// True when all four marginals are non-empty.
    pub const fn has_nonempty_margins(&self) -> bool {
        self.n_x() > 0 && self.n_y() > 0 && self.n_nx() > 0 && self.n_ny() > 0
    }

    pub fn probabilities(&self) -> Result<Probabilities> {
        let n = self.n();
        if n == 0 {
            return Err(Error::EmptyTable);
        }
        let n = n as f64;
        let p = |c: u64| c as f64 / n;
        Ok(Probabilities {
            xy: p(self.n_xy),
            xny: p(self.n_xny),
            nxy: p(self.n_nxy),
            nxny: p(self.n_nxny),
            x: p(self.n_x()),
            y: p(self.n_y()),
            nx: p(self.n_nx()),
            ny: p(self.n_ny()),
        })
    }

    pub fn transform(&self, kind: TransformKind) -> Result<Self> {
        let [a, b, c, d] = self.cells();
        let cells = match kind {
            TransformKind::Swap => [a, c, b, d],
            TransformKind::NegateConclusion => [b, a, d, c],
            TransformKind::NegatePremise => [c, d, a, b],
            TransformKind::BothNegated => [d, c, b, a],
            TransformKind::Contrapositive => [d, b, c, a],
            TransformKind::UniformScale(k) => {
                check_scale(&[k])?;
                [a * k, b * k, c * k, d * k]
            }
            TransformKind::RowScale(k1, k2) => {
                check_scale(&[k1, k2])?;
                [a * k1, b * k1, c * k2, d * k2]
            }
            TransformKind::ColScale(k1, k2) => {
                check_scale(&[k1, k2])?;
                [a * k1, b * k2, c * k1, d * k2]
            }
        };
        Ok(Self::from_counts(cells))
    }

    pub fn classify_state(&self) -> Result<RuleState> {
        if self.n() == 0 {
            return Err(Error::EmptyTable);
        }
        let lhs = self.n_xy as u128 * self.n() as u128;
        let rhs = self.n_x() as u128 * self.n_y() as u128;
        Ok(RuleState {
            incompatibility: self.n_xy == 0,
            independence: lhs == rhs,
            equilibrium: 2 * self.n_xy == self.n_x(),
            logical_implication: self.n_xny == 0 && self.n_x() > 0,
            attraction: lhs > rhs,
            repulsion: lhs < rhs,
        })
    }

    /// Exact independence test `n_xy · n = n_x · n_y`.
    pub fn is_independent(&self) -> bool {
        self.n_xy as u128 * self.n() as u128 == self.n_x() as u128 * self.n_y() as u128
    }

    /// Reduces the cells by their greatest common divisor.
    pub fn reduced(&self) -> Self {
        let g = self.cells().iter().fold(0, |g, &c| gcd(g, c));
        if g <= 1 {
            *self
        } else {
            let [a, b, c, d] = self.cells();
            Self::from_counts([a / g, b / g, c / g, d / g])
        }
    }
}

fn check_scale(ks: &[u64]) -> Result<()> {
    if ks.contains(&0) {
        Err(Error::NonPositiveScale)
    } else {
        Ok(())
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl fmt::Display for ContingencyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.n_xy, self.n_xny, self.n_nxy, self.n_nxny
        )
    }
}

impl FromStr for ContingencyTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::TableLiteral(s.to_string()));
        }
        let mut cells = [0i64; 4];
        for (slot, part) in cells.iter_mut().zip(&parts) {
            *slot = part
                .parse::<i64>()
                .map_err(|_| Error::TableLiteral(s.to_string()))?;
        }
        Self::new(cells[0], cells[1], cells[2], cells[3])
    }
}

/// Characteristic situations of a rule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleState {
    pub incompatibility: bool,
    pub independence: bool,
    /// `P(Y/X) = 1/2`.
    pub equilibrium: bool,
    pub logical_implication: bool,
    pub attraction: bool,
    pub repulsion: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransformKind {
    /// `Y → X`
    Swap,
    /// `X → Ȳ`
    NegateConclusion,
    /// `X̄ → Y`
    NegatePremise,
    /// `X̄ → Ȳ`
    BothNegated,
    /// `Ȳ → X̄`
    Contrapositive,
    UniformScale(u64),
    /// Multiplies the `X` row by the first factor and the `X̄` row by the second.
    RowScale(u64, u64),
    /// Multiplies the `Y` column by the first factor and the `Ȳ` column by the second.
    ColScale(u64, u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StateFilter {
    Incompatibility,
    Independence,
    Equilibrium,
    LogicalImplication,
    Attraction,
    Repulsion,
}

impl StateFilter {
    pub fn accepts(&self, state: &RuleState) -> bool {
        match self {
            StateFilter::Incompatibility => state.incompatibility,
            StateFilter::Independence => state.independence,
            StateFilter::Equilibrium => state.equilibrium,
            StateFilter::LogicalImplication => state.logical_implication,
            StateFilter::Attraction => state.attraction,
            StateFilter::Repulsion => state.repulsion,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationConfig {
    pub n_max: u64,
    pub state_filter: Option<StateFilter>,
    pub require_nonempty_margins: bool,
}

impl EnumerationConfig {
    pub fn new(n_max: u64) -> Self {
        Self {
            n_max,
            state_filter: None,
            require_nonempty_margins: false,
        }
    }
}

/// Every table with `1 ≤ n ≤ n_max` passing the filter, grouped by ascending
/// `n` and lexicographic in the cells within each `n`.
pub fn enumerate_tables(cfg: EnumerationConfig) -> Result<impl Iterator<Item = ContingencyTable>> {
    if cfg.n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    Ok(all_tables(cfg.n_max).filter(move |t| {
        if cfg.require_nonempty_margins && !t.has_nonempty_margins() {
            return false;
        }
        match cfg.state_filter {
            None => true,
            Some(filter) => t
                .classify_state()
                .map(|s| filter.accepts(&s))
                .unwrap_or(false),
        }
    }))
}

fn all_tables(n_max: u64) -> impl Iterator<Item = ContingencyTable> {
    (1..=n_max).flat_map(|n| {
        (0..=n).flat_map(move |a| {
            (0..=n - a).flat_map(move |b| {
                (0..=n - a - b)
                    .map(move |c| ContingencyTable::from_counts([a, b, c, n - a - b - c]))
            })
        })
    })
}

/// Number of tables with total exactly `n`: `C(n+3, 3)`.
pub fn tables_with_total(n: u64) -> u64 {
    (n + 1) * (n + 2) * (n + 3) / 6
}

/// Dense index over all tables with `1 ≤ n ≤ n_max`, in enumeration order.
#[derive(Debug, Clone)]
pub struct TableSpace {
    n_max: u64,
    offsets: Vec<usize>,
}

impl TableSpace {
    pub fn new(n_max: u64) -> Self {
        let mut offsets = Vec::with_capacity(n_max as usize + 2);
        offsets.push(0);
        offsets.push(0);
        for n in 1..=n_max {
            let last = *offsets.last().unwrap();
            offsets.push(last + tables_with_total(n) as usize);
        }
        Self { n_max, offsets }
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn tables(&self) -> impl Iterator<Item = ContingencyTable> {
        all_tables(self.n_max)
    }

    /// Position of `t` in enumeration order, if it lies within the bound.
    pub fn index_of(&self, t: &ContingencyTable) -> Option<usize> {
        let n = t.n();
        if n == 0 || n > self.n_max {
            return None;
        }
        let [a, b, c, _] = t.cells();
        let mut rank = 0u64;
        // tuples with a smaller first cell: C(n - a' + 2, 2) each
        for a2 in 0..a {
            let m = n - a2;
            rank += (m + 2) * (m + 1) / 2;
        }
        for b2 in 0..b {
            rank += n - a - b2 + 1;
        }
        rank += c;
        Some(self.offsets[n as usize] + rank as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: i64, b: i64, c: i64, d: i64) -> ContingencyTable {
        ContingencyTable::new(a, b, c, d).unwrap()
    }

    #[test]
    fn derived_marginals() {
        let table = t(40, 10, 20, 30);
        assert_eq!(table.n(), 100);
        assert_eq!(table.n_x(), 50);
        assert_eq!(table.n_y(), 60);
        assert_eq!(table.n_nx(), 50);
        assert_eq!(table.n_ny(), 40);
    }

    #[test]
    fn empty_table_has_no_probabilities() {
        let table = t(0, 0, 0, 0);
        assert_eq!(table.n(), 0);
        assert_eq!(table.probabilities(), Err(Error::EmptyTable));
        assert_eq!(table.classify_state(), Err(Error::EmptyTable));
    }

    #[test]
    fn empty_margins_still_valid() {
        let p = t(0, 0, 0, 5).probabilities().unwrap();
        assert_eq!(p.xy, 0.0);
        assert_eq!(p.nxny, 1.0);
    }

    #[test]
    fn negative_counts_rejected() {
        assert_eq!(
            ContingencyTable::new(1, -2, 3, 4),
            Err(Error::NegativeCount(-2))
        );
    }

    #[test]
    fn transforms() {
        assert_eq!(
            t(40, 10, 20, 30).transform(TransformKind::Swap).unwrap(),
            t(40, 20, 10, 30)
        );
        assert_eq!(
            t(1, 2, 3, 4)
                .transform(TransformKind::UniformScale(2))
                .unwrap(),
            t(2, 4, 6, 8)
        );
        // Ȳ → X̄ of a logical implication is again a logical implication
        assert_eq!(
            t(50, 0, 10, 40)
                .transform(TransformKind::Contrapositive)
                .unwrap(),
            t(40, 0, 10, 50)
        );
        assert_eq!(
            t(1, 2, 3, 4)
                .transform(TransformKind::RowScale(2, 3))
                .unwrap(),
            t(2, 4, 9, 12)
        );
        assert_eq!(
            t(1, 2, 3, 4)
                .transform(TransformKind::ColScale(2, 3))
                .unwrap(),
            t(2, 6, 6, 12)
        );
        assert_eq!(
            t(1, 2, 3, 4).transform(TransformKind::RowScale(0, 3)),
            Err(Error::NonPositiveScale)
        );
    }

    #[test]
    fn states() {
        let s = t(30, 20, 30, 20).classify_state().unwrap();
        assert!(s.independence && !s.attraction && !s.repulsion);

        let s = t(50, 0, 10, 40).classify_state().unwrap();
        assert!(s.logical_implication && s.attraction);

        let s = t(25, 25, 35, 15).classify_state().unwrap();
        assert!(s.equilibrium);

        let s = t(0, 5, 5, 0).classify_state().unwrap();
        assert!(s.incompatibility && s.repulsion);
    }

    #[test]
    fn enumeration_counts() {
        let count = |n_max| {
            enumerate_tables(EnumerationConfig::new(n_max))
                .unwrap()
                .count()
        };
        assert_eq!(count(1), 4);
        assert_eq!(count(2), 14);
        assert!(enumerate_tables(EnumerationConfig::new(0)).is_err());
    }

    #[test]
    fn independence_filter() {
        let cfg = EnumerationConfig {
            n_max: 6,
            state_filter: Some(StateFilter::Independence),
            require_nonempty_margins: false,
        };
        let tables: Vec<_> = enumerate_tables(cfg).unwrap().collect();
        assert!(tables.contains(&t(1, 1, 1, 1)));
        assert!(tables.contains(&t(1, 2, 1, 2)));
        // brute-force re-check of the integer test
        for table in &tables {
            assert_eq!(table.n_xy() * table.n(), table.n_x() * table.n_y());
        }
        let brute = all_tables(6)
            .filter(|t| t.n_xy() * t.n() == t.n_x() * t.n_y())
            .count();
        assert_eq!(tables.len(), brute);
    }

    #[test]
    fn table_space_indexes_in_order() {
        let space = TableSpace::new(9);
        for (i, table) in space.tables().enumerate() {
            assert_eq!(space.index_of(&table), Some(i));
        }
        assert_eq!(
            space.len(),
            (1..=9).map(tables_with_total).sum::<u64>() as usize
        );
        assert_eq!(space.index_of(&t(5, 5, 0, 0)), None);
    }

    #[test]
    fn literal_round_trip() {
        let table: ContingencyTable = "40,10,20,30".parse().unwrap();
        assert_eq!(table, t(40, 10, 20, 30));
        assert_eq!(table.to_string(), "40,10,20,30");
        assert!("1,2,3".parse::<ContingencyTable>().is_err());
        assert!("1,-2,3,4".parse::<ContingencyTable>().is_err());
    }
}
