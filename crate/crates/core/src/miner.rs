//! Basket databases, Apriori, rule generation and rule scoring.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::contingency::ContingencyTable;
use crate::error::{Error, Result};
use crate::measures::{descriptor, evaluate, MeasureParams, MeasureValue, RuleContext, PDI_ID};

/// Item count above which a support floor below one basket is refused.
pub const ITEM_GUARD: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionDb {
    /// Tokens in lexicographic order; an item id is its index here.
    items: Vec<String>,
    baskets: Vec<Vec<u32>>,
}

impl TransactionDb {
    /// Tokens per basket; duplicates collapse, empty baskets are dropped.
    pub fn from_baskets<I, B, S>(baskets: I) -> Result<Self>
    where
        I: IntoIterator<Item = B>,
        B: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let raw: Vec<BTreeSet<String>> = baskets
            .into_iter()
            .map(|b| {
                b.into_iter()
                    .map(|s| s.as_ref().to_string())
                    .collect::<BTreeSet<_>>()
            })
            .filter(|b| !b.is_empty())
            .collect();
        if raw.is_empty() {
            return Err(Error::NoBaskets);
        }
        let items: Vec<String> = raw
            .iter()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: BTreeMap<&str, u32> = items
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i as u32))
            .collect();
        let baskets = raw
            .iter()
            .map(|b| b.iter().map(|s| index[s.as_str()]).collect())
            .collect();
        Ok(Self { items, baskets })
    }

    pub fn n_baskets(&self) -> u64 {
        self.baskets.len() as u64
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn baskets(&self) -> &[Vec<u32>] {
        &self.baskets
    }

    pub fn item_id(&self, token: &str) -> Option<u32> {
        self.items
            .binary_search_by(|s| s.as_str().cmp(token))
            .ok()
            .map(|i| i as u32)
    }

    /// Tokens joined by `&`.
    pub fn label(&self, itemset: &[u32]) -> String {
        itemset
            .iter()
            .map(|&i| self.items[i as usize].as_str())
            .collect::<Vec<_>>()
            .join("&")
    }

    /// Baskets containing every item of `itemset`.
    pub fn count(&self, itemset: &[u32]) -> u64 {
        self.baskets
            .iter()
            .filter(|b| itemset.iter().all(|i| b.binary_search(i).is_ok()))
            .count() as u64
    }
}

/// One basket per line, whitespace-separated tokens.
pub fn load_transactions(source: impl BufRead) -> Result<TransactionDb> {
    let mut baskets = Vec::new();
    for line in source.lines() {
        let line = line?;
        baskets.push(
            line.split_whitespace()
                .map(str::to_string)
                .collect::<Vec<_>>(),
        );
    }
    TransactionDb::from_baskets(baskets)
}

pub fn load_transactions_path(path: &Path) -> Result<TransactionDb> {
    let file =
        std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_transactions(std::io::BufReader::new(file))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequentItemset {
    pub items: Vec<u32>,
    pub count: u64,
    pub support: f64,
}

/// `count / n >= minsupp`, with slack for the decimal spelling of `minsupp`.
pub fn meets(count: u64, total: u64, threshold: f64) -> bool {
    count as f64 >= threshold * total as f64 - 1e-9
}

fn check_fraction(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!(
            "{name} must lie in [0, 1], got {x}"
        )));
    }
    Ok(())
}

pub fn apriori(db: &TransactionDb, minsupp: f64) -> Result<Vec<FrequentItemset>> {
    apriori_with(db, minsupp, false)
}

/// Level-wise mining; only itemsets seen in at least one basket are reported.
/// Output is ordered by size, then lexicographically.
pub fn apriori_with(
    db: &TransactionDb,
    minsupp: f64,
    allow_unbounded: bool,
) -> Result<Vec<FrequentItemset>> {
    check_fraction("minsupp", minsupp)?;
    let n = db.n_baskets();
    if !allow_unbounded && db.n_items() > ITEM_GUARD && (minsupp * n as f64) < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "minsupp {minsupp} is below one basket with {} items; pass the override to mine anyway",
            db.n_items()
        )));
    }
    let words = db.n_items().div_ceil(64);
    let bits: Vec<Vec<u64>> = db
        .baskets
        .iter()
        .map(|b| {
            let mut w = vec![0u64; words];
            for &i in b {
                w[i as usize / 64] |= 1 << (i % 64);
            }
            w
        })
        .collect();
    let count = |items: &[u32]| -> u64 {
        let mut mask = vec![0u64; words];
        for &i in items {
            mask[i as usize / 64] |= 1 << (i % 64);
        }
        bits.iter()
            .filter(|b| b.iter().zip(&mask).all(|(x, m)| x & m == *m))
            .count() as u64
    };
    let keep = |c: u64| c >= 1 && meets(c, n, minsupp);

    let mut out = Vec::new();
    let mut level: Vec<(Vec<u32>, u64)> = (0..db.n_items() as u32)
        .map(|i| (vec![i], count(&[i])))
        .filter(|(_, c)| keep(*c))
        .collect();
    while !level.is_empty() {
        let known: BTreeSet<&[u32]> = level.iter().map(|(s, _)| s.as_slice()).collect();
        let mut candidates = Vec::new();
        for (i, (a, _)) in level.iter().enumerate() {
            for (b, _) in &level[i + 1..] {
                let k = a.len();
                if a[..k - 1] != b[..k - 1] {
                    break;
                }
                let mut c = a.clone();
                c.push(b[k - 1]);
                let closed = (0..c.len()).all(|skip| {
                    let sub: Vec<u32> = c
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != skip)
                        .map(|(_, &x)| x)
                        .collect();
                    known.contains(sub.as_slice())
                });
                if closed {
                    candidates.push(c);
                }
            }
        }
        let next: Vec<(Vec<u32>, u64)> = candidates
            .into_par_iter()
            .map(|c| {
                let k = count(&c);
                (c, k)
            })
            .filter(|(_, k)| keep(*k))
            .collect();
        out.append(&mut level);
        level = next;
    }
    Ok(out
        .into_iter()
        .map(|(items, count)| FrequentItemset {
            items,
            count,
            support: count as f64 / n as f64,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinedRule {
    pub premise: Vec<u32>,
    pub conclusion: Vec<u32>,
    pub table: ContingencyTable,
    pub scores: BTreeMap<u8, MeasureValue>,
}

impl MinedRule {
    pub fn support(&self) -> f64 {
        self.table.n_xy() as f64 / self.table.n() as f64
    }

    pub fn confidence(&self) -> f64 {
        self.table.n_xy() as f64 / self.table.n_x() as f64
    }
}

/// Every premise/conclusion split of every frequent itemset with
/// confidence at least `minconf`, ordered by premise then conclusion.
pub fn generate_rules(
    frequents: &[FrequentItemset],
    db: &TransactionDb,
    minconf: f64,
) -> Result<Vec<MinedRule>> {
    check_fraction("minconf", minconf)?;
    let n = db.n_baskets();
    let counts: BTreeMap<&[u32], u64> = frequents
        .iter()
        .map(|f| (f.items.as_slice(), f.count))
        .collect();
    let count_of = |s: &[u32]| counts.get(s).copied().unwrap_or_else(|| db.count(s));
    let mut rules = Vec::new();
    for f in frequents.iter().filter(|f| f.items.len() >= 2) {
        let k = f.items.len();
        for mask in 1..(1u32 << k) - 1 {
            let (premise, conclusion): (Vec<u32>, Vec<u32>) = {
                let mut p = Vec::new();
                let mut c = Vec::new();
                for (j, &x) in f.items.iter().enumerate() {
                    if mask & (1 << j) != 0 {
                        p.push(x);
                    } else {
                        c.push(x);
                    }
                }
                (p, c)
            };
            let n_x = count_of(&premise);
            let n_y = count_of(&conclusion);
            let n_xy = f.count;
            if !meets(n_xy, n_x, minconf) {
                continue;
            }
            let table =
                ContingencyTable::from_counts([n_xy, n_x - n_xy, n_y - n_xy, n + n_xy - n_x - n_y]);
            rules.push(MinedRule {
                premise,
                conclusion,
                table,
                scores: BTreeMap::new(),
            });
        }
    }
    rules.sort_by(|a, b| (&a.premise, &a.conclusion).cmp(&(&b.premise, &b.conclusion)));
    Ok(rules)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextPolicy {
    None,
    /// The mined rules themselves form the context.
    MinedRules,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedReport {
    pub measures: Vec<u8>,
    pub rank_by: u8,
    pub rules: Vec<MinedRule>,
}

fn rank_key(v: MeasureValue) -> (u8, f64) {
    match v {
        MeasureValue::PosInf => (0, 0.0),
        MeasureValue::Finite(x) => (1, -x),
        MeasureValue::NegInf => (2, 0.0),
        MeasureValue::Undefined => (3, 0.0),
    }
}

/// Scores every rule and orders by `rank_by` descending; undefined values
/// sink, ties keep rule order.
pub fn score_rules(
    mut rules: Vec<MinedRule>,
    selection: &[u8],
    rank_by: u8,
    params: &MeasureParams,
    policy: ContextPolicy,
) -> Result<RankedReport> {
    if selection.is_empty() {
        return Err(Error::InvalidArgument("measure selection is empty".into()));
    }
    for &m in selection.iter().chain([&rank_by]) {
        descriptor(m)?;
    }
    if !selection.contains(&rank_by) {
        return Err(Error::InvalidArgument(format!(
            "ranking measure {rank_by} is not in the selection"
        )));
    }
    params.validate()?;
    let ctx = match policy {
        ContextPolicy::MinedRules if !rules.is_empty() => {
            Some(RuleContext::new(rules.iter().map(|r| r.table).collect())?)
        }
        _ => None,
    };
    if selection.contains(&PDI_ID) && ctx.is_none() {
        return Err(Error::MissingContext(PDI_ID));
    }
    for r in &mut rules {
        r.scores = selection
            .iter()
            .map(|&m| Ok((m, evaluate(m, &r.table, params, ctx.as_ref())?)))
            .collect::<Result<_>>()?;
    }
    rules.sort_by(|a, b| {
        let (ka, kb) = (rank_key(a.scores[&rank_by]), rank_key(b.scores[&rank_by]));
        ka.0.cmp(&kb.0)
            .then(ka.1.total_cmp(&kb.1))
            .then_with(|| (&a.premise, &a.conclusion).cmp(&(&b.premise, &b.conclusion)))
    });
    Ok(RankedReport {
        measures: selection.to_vec(),
        rank_by,
        rules,
    })
}

impl RankedReport {
    pub fn to_csv(&self, db: &TransactionDb) -> Result<String> {
        let mut s = String::from("premise,conclusion,n_xy,n_xny,n_nxy,n_nxny");
        for &m in &self.measures {
            let _ = write!(s, ",{}", descriptor(m)?.canonical_name);
        }
        s.push('\n');
        for r in &self.rules {
            let [a, b, c, d] = r.table.cells();
            let _ = write!(
                s,
                "{},{},{a},{b},{c},{d}",
                db.label(&r.premise),
                db.label(&r.conclusion)
            );
            for m in &self.measures {
                let _ = write!(s, ",{}", r.scores[m]);
            }
            s.push('\n');
        }
        Ok(s)
    }

    pub fn to_json(&self, db: &TransactionDb) -> Result<String> {
        #[derive(Serialize)]
        struct Row<'a> {
            premise: String,
            conclusion: String,
            table: [u64; 4],
            scores: BTreeMap<&'a str, MeasureValue>,
        }
        let rows = self
            .rules
            .iter()
            .map(|r| {
                Ok(Row {
                    premise: db.label(&r.premise),
                    conclusion: db.label(&r.conclusion),
                    table: r.table.cells(),
                    scores: r
                        .scores
                        .iter()
                        .map(|(&m, &v)| Ok((descriptor(m)?.canonical_name, v)))
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(serde_json::to_string_pretty(&rows)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> TransactionDb {
        load_transactions("a b\nb a\na c\n".as_bytes()).unwrap()
    }

    #[test]
    fn loading() {
        let db = load_transactions("a b c\na c\n".as_bytes()).unwrap();
        assert_eq!((db.n_baskets(), db.n_items()), (2, 3));
        let db = load_transactions("a a b\n\n".as_bytes()).unwrap();
        assert_eq!(db.baskets(), &[vec![0, 1]]);
        assert_eq!(load_transactions("".as_bytes()), Err(Error::NoBaskets));
        assert_eq!(load_transactions(" \n\n".as_bytes()), Err(Error::NoBaskets));
    }

    #[test]
    fn hand_counted_frequents() {
        let db = fixture();
        let f = apriori(&db, 2.0 / 3.0).unwrap();
        let got: Vec<(String, u64)> = f.iter().map(|x| (db.label(&x.items), x.count)).collect();
        assert_eq!(
            got,
            vec![("a".into(), 3), ("b".into(), 2), ("a&b".into(), 2)]
        );
        assert_eq!(f[0].support, 1.0);
        let all = apriori(&db, 1.0).unwrap();
        assert_eq!(all.len(), 1);
        assert!(apriori(&db, 1.5).is_err());
    }

    #[test]
    fn hand_counted_rules() {
        let db = fixture();
        let f = apriori(&db, 2.0 / 3.0).unwrap();
        let rules = generate_rules(&f, &db, 0.5).unwrap();
        assert_eq!(rules.len(), 2);
        let ab = &rules[0];
        assert_eq!(
            (db.label(&ab.premise), db.label(&ab.conclusion)),
            ("a".into(), "b".into())
        );
        assert_eq!(ab.table.cells(), [2, 1, 0, 0]);
        assert_eq!(ab.confidence(), 2.0 / 3.0);
        assert_eq!(ab.support(), 2.0 / 3.0);
        let strict = generate_rules(&f, &db, 1.0).unwrap();
        assert_eq!(strict.len(), 1);
        assert_eq!(strict[0].table.n_xny(), 0);
    }

    #[test]
    fn ranking_by_confidence() {
        let db = fixture();
        let f = apriori(&db, 1.0 / 3.0).unwrap();
        let rules: Vec<MinedRule> = generate_rules(&f, &db, 0.0)
            .unwrap()
            .into_iter()
            .filter(|r| db.label(&r.premise) == "a")
            .collect();
        let report = score_rules(
            rules,
            &[3, 54],
            3,
            &MeasureParams::default(),
            ContextPolicy::None,
        )
        .unwrap();
        let order: Vec<String> = report
            .rules
            .iter()
            .map(|r| db.label(&r.conclusion))
            .collect();
        assert_eq!(order, vec!["b", "c"]);
        let csv = report.to_csv(&db).unwrap();
        assert!(csv.starts_with("premise,conclusion,n_xy,n_xny,n_nxy,n_nxny,Confidence,Support\n"));
    }

    #[test]
    fn pdi_needs_the_mined_context() {
        let db = load_transactions("a b\na b\na c\nb c\nc\n".as_bytes()).unwrap();
        let f = apriori(&db, 0.2).unwrap();
        let rules = generate_rules(&f, &db, 0.0).unwrap();
        let p = MeasureParams::default();
        assert!(score_rules(rules.clone(), &[28], 28, &p, ContextPolicy::None).is_err());
        let r = score_rules(rules, &[28], 28, &p, ContextPolicy::MinedRules).unwrap();
        assert!(r.rules.iter().all(|x| x.scores[&28].is_defined()));
    }

    #[test]
    fn guard_on_wide_item_sets() {
        let db = TransactionDb::from_baskets((0..30).map(|i| [format!("i{i}")])).unwrap();
        assert!(apriori(&db, 0.0).is_err());
        assert_eq!(apriori_with(&db, 0.0, true).unwrap().len(), 30);
        assert_eq!(apriori(&db, 1.0 / 30.0).unwrap().len(), 30);
    }

    #[test]
    fn unknown_measure_rejected() {
        let db = fixture();
        let f = apriori(&db, 0.5).unwrap();
        let rules = generate_rules(&f, &db, 0.0).unwrap();
        assert!(score_rules(
            rules,
            &[99],
            99,
            &MeasureParams::default(),
            ContextPolicy::None
        )
        .is_err());
    }
}
