//! Collapsing the measure set: formulas that coincide on every table, rows
//! of the property matrix that coincide on every property, and properties
//! that coincide on every measure.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::contingency::{ContingencyTable, TableSpace};
use crate::error::Result;
use crate::measures::variants::{formula_variants, FormulaKey};
use crate::measures::{resolve, RuleContext};
use crate::properties::{same, EvaluationConfig, MatrixRow, PropertyId, PropertyMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupingKind {
    Extensional,
    PropertyVector,
}

/// Disjoint groups, each sorted, each represented by its smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceGrouping<T> {
    pub kind: GroupingKind,
    pub groups: Vec<Vec<T>>,
    pub representatives: Vec<T>,
}

impl<T: Ord + Copy> EquivalenceGrouping<T> {
    fn from_groups(kind: GroupingKind, mut groups: Vec<Vec<T>>) -> Self {
        for g in &mut groups {
            g.sort();
        }
        groups.sort();
        let representatives = groups.iter().map(|g| g[0]).collect();
        Self {
            kind,
            groups,
            representatives,
        }
    }

    /// Groups with more than one member.
    pub fn duplicates(&self) -> impl Iterator<Item = &[T]> {
        self.groups
            .iter()
            .filter(|g| g.len() > 1)
            .map(Vec::as_slice)
    }

    pub fn group_of(&self, x: T) -> Option<&[T]> {
        self.groups
            .iter()
            .find(|g| g.contains(&x))
            .map(Vec::as_slice)
    }
}

/// Groups the registry formulas and their literature aliases by agreement
/// on every table with `1 ≤ n ≤ n_max`. Two formulas undefined on different
/// tables are never grouped.
pub fn extensional_duplicates(cfg: &EvaluationConfig) -> Result<EquivalenceGrouping<FormulaKey>> {
    cfg.validate()?;
    let space = TableSpace::new(cfg.n_max);
    let tables: Vec<ContingencyTable> = space.tables().collect();
    let ctx = RuleContext::new(
        tables
            .iter()
            .copied()
            .filter(ContingencyTable::has_nonempty_margins)
            .collect(),
    )?;
    let variants = formula_variants();
    let k = variants.len();
    let all_pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();

    let agree = tables
        .par_chunks(4096)
        .map(|chunk| {
            let mut alive = all_pairs.clone();
            let mut vals = vec![0.0; k];
            for t in chunk {
                if alive.is_empty() {
                    break;
                }
                for (v, f) in vals.iter_mut().zip(&variants) {
                    *v = f.evaluate(t, &cfg.params, Some(&ctx));
                }
                alive.retain(|&(i, j)| same(vals[i], vals[j], cfg.tol));
            }
            alive
        })
        .reduce(
            || all_pairs.clone(),
            |a, b| a.into_iter().filter(|p| b.contains(p)).collect(),
        );

    // connected components of the agreement graph
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, j) in agree {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        parent[ri.max(rj)] = ri.min(rj);
    }
    let mut groups: BTreeMap<usize, Vec<FormulaKey>> = BTreeMap::new();
    for (i, v) in variants.iter().enumerate() {
        groups.entry(find(&mut parent, i)).or_default().push(v.key);
    }
    Ok(EquivalenceGrouping::from_groups(
        GroupingKind::Extensional,
        groups.into_values().collect(),
    ))
}

/// Groups measures whose 19 values coincide.
pub fn identical_property_groups(matrix: &PropertyMatrix) -> Result<EquivalenceGrouping<u8>> {
    let mut groups: BTreeMap<[u8; 19], Vec<u8>> = BTreeMap::new();
    for (m, row) in matrix.value_rows()? {
        groups.entry(row).or_default().push(m);
    }
    Ok(EquivalenceGrouping::from_groups(
        GroupingKind::PropertyVector,
        groups.into_values().collect(),
    ))
}

/// Keeps one row per group, in the matrix's own order.
pub fn reduce(
    matrix: &PropertyMatrix,
    grouping: &EquivalenceGrouping<u8>,
) -> Result<PropertyMatrix> {
    let keep: Vec<MatrixRow> = matrix
        .rows()
        .iter()
        .filter(|r| grouping.representatives.contains(&r.measure))
        .cloned()
        .collect();
    PropertyMatrix::new(keep)
}

/// Property pairs whose columns are equal on every row.
pub fn redundant_properties(matrix: &PropertyMatrix) -> Result<Vec<(PropertyId, PropertyId)>> {
    let rows = matrix.value_rows()?;
    let ids: Vec<PropertyId> = PropertyId::all().collect();
    let mut out = Vec::new();
    for (i, &p) in ids.iter().enumerate() {
        for &q in &ids[i + 1..] {
            let (pi, qi) = (usize::from(p.index()) - 1, usize::from(q.index()) - 1);
            if rows.iter().all(|(_, r)| r[pi] == r[qi]) {
                out.push((p, q));
            }
        }
    }
    Ok(out)
}

/// Measure sets published as sharing one property vector.
pub const PUBLISHED_IDENTICAL_GROUPS: [&[&str]; 7] = [
    &["Correlation coefficient", "Novelty"],
    &[
        "Causal confidence",
        "Causal-confirm confidence",
        "Negative reliability",
    ],
    &["Cosine", "Czekanowski-Dice"],
    &["Causal dependency", "Leverage", "Specificity"],
    &["Collective strength", "Odds ratio"],
    &["Gini", "Mutual information"],
    &["Jaccard", "Kulczynski"],
];

pub fn published_identical_groups() -> Vec<Vec<u8>> {
    PUBLISHED_IDENTICAL_GROUPS
        .iter()
        .map(|g| {
            let mut ids: Vec<u8> = g
                .iter()
                .map(|n| resolve(n).expect("published name resolves"))
                .collect();
            ids.sort_unstable();
            ids
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupComparison {
    /// Published groups found whole inside one computed group.
    pub reproduced: Vec<Vec<u8>>,
    /// Published groups spread over several computed groups.
    pub split: Vec<Vec<u8>>,
    /// Computed groups no published group accounts for.
    pub extra: Vec<Vec<u8>>,
}

pub fn compare_with_published(grouping: &EquivalenceGrouping<u8>) -> GroupComparison {
    let published = published_identical_groups();
    let mut reproduced = Vec::new();
    let mut split = Vec::new();
    for g in &published {
        let home = grouping.group_of(g[0]);
        if home.is_some_and(|h| g.iter().all(|m| h.contains(m))) {
            reproduced.push(g.clone());
        } else {
            split.push(g.clone());
        }
    }
    let extra = grouping
        .duplicates()
        .filter(|d| !published.iter().any(|g| d.iter().all(|m| g.contains(m))))
        .map(<[u8]>::to_vec)
        .collect();
    GroupComparison {
        reproduced,
        split,
        extra,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::properties::Method;

    fn matrix(text: &str) -> PropertyMatrix {
        let mut csv = String::from("measure");
        for p in PropertyId::all() {
            csv.push_str(&format!(",{p}"));
        }
        csv.push('\n');
        csv.push_str(text);
        PropertyMatrix::from_csv(&csv, Method::Computed).unwrap()
    }

    const ROW_A: &str = "0,1,1,1,1,0,1,0,0,1,1,1,0,1,1,1,0,0,1";
    const ROW_B: &str = "1,1,1,1,0,0,0,1,1,0,0,1,0,0,0,0,0,0,1";

    #[test]
    fn identical_rows_group() {
        let m = matrix(&format!("3,{ROW_B}\n1,{ROW_A}\n43,{ROW_A}\n"));
        let g = identical_property_groups(&m).unwrap();
        assert_eq!(g.groups, vec![vec![1, 43], vec![3]]);
        assert_eq!(g.representatives, vec![1, 3]);
        let reduced = reduce(&m, &g).unwrap();
        assert_eq!(reduced.measures(), vec![3, 1]);
        let again = identical_property_groups(&reduced).unwrap();
        assert_eq!(again.groups, vec![vec![1], vec![3]]);
    }

    #[test]
    fn single_row_reports_equal_columns() {
        let m = matrix(&format!("1,{ROW_A}\n"));
        let pairs = redundant_properties(&m).unwrap();
        let zeros = ROW_A.split(',').filter(|v| *v == "0").count();
        let ones = 19 - zeros;
        assert_eq!(pairs.len(), zeros * (zeros - 1) / 2 + ones * (ones - 1) / 2);
    }

    #[test]
    fn injected_duplicate_column_is_found() {
        let m = matrix(&format!("1,{ROW_A}\n3,{ROW_B}\n"));
        let pairs = redundant_properties(&m).unwrap();
        let p = |i| PropertyId::new(i).unwrap();
        assert!(pairs.contains(&(p(2), p(3))));
        assert!(!pairs.contains(&(p(1), p(2))));
    }

    #[test]
    fn published_groups_resolve() {
        let g = published_identical_groups();
        assert_eq!(g.iter().map(Vec::len).sum::<usize>(), 16);
        assert_eq!(g[2], vec![11, 13]);
    }

    #[test]
    fn small_bound_aliases() {
        let g = extensional_duplicates(&EvaluationConfig::with_n_max(10)).unwrap();
        let key = |measure, variant| FormulaKey { measure, variant };
        assert_eq!(g.group_of(key(46, 1)).unwrap(), &[key(46, 0), key(46, 1)]);
        assert_eq!(g.group_of(key(54, 0)).unwrap(), &[key(54, 0), key(54, 1)]);
        assert_eq!(g.group_of(key(34, 0)).unwrap(), &[key(34, 0)]);
    }
}
