//! Disjunctive encoding of the property matrix, Ward agglomerative
//! clustering, seeded k-means, consensus classes and partition agreement.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{registry, resolve};
use crate::properties::{
    build_matrix, EvaluationConfig, PropertyId, PropertyMatrix, ReferenceMatrix,
};

/// One indicator column per admissible value of each property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EncodedMatrix {
    pub ids: Vec<u8>,
    pub labels: Vec<String>,
    pub rows: Vec<Vec<u8>>,
}

impl EncodedMatrix {
    pub fn columns(&self) -> usize {
        self.labels.len()
    }

    /// Squared Euclidean distance, exact.
    pub fn sq_dist(&self, i: usize, j: usize) -> u32 {
        self.rows[i]
            .iter()
            .zip(&self.rows[j])
            .map(|(&x, &y)| u32::from(x.abs_diff(y)).pow(2))
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("measure");
        for l in &self.labels {
            let _ = write!(s, ",{l}");
        }
        s.push('\n');
        for (id, row) in self.ids.iter().zip(&self.rows) {
            let _ = write!(s, "{id}");
            for v in row {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
        s
    }
}

pub fn disjunctive_encode(matrix: &PropertyMatrix) -> Result<EncodedMatrix> {
    let labels: Vec<String> = PropertyId::all()
        .flat_map(|p| (0..p.arity()).map(move |v| format!("{p}={v}")))
        .collect();
    let mut ids = Vec::with_capacity(matrix.len());
    let mut rows = Vec::with_capacity(matrix.len());
    for (id, values) in matrix.value_rows()? {
        let mut row = Vec::with_capacity(labels.len());
        for (p, &v) in PropertyId::all().zip(values.iter()) {
            p.check_value(v)?;
            row.extend((0..p.arity()).map(|x| u8::from(x == v)));
        }
        ids.push(id);
        rows.push(row);
    }
    Ok(EncodedMatrix { ids, labels, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Merge {
    /// Node ids: leaves are `0..n`, merge `i` creates node `n + i`.
    pub left: usize,
    pub right: usize,
    /// Increase of the within-cluster sum of squares.
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dendrogram {
    pub leaves: Vec<u8>,
    pub merges: Vec<Merge>,
}

/// Ward linkage through the Lance–Williams recurrence on squared distances.
pub fn ahc_ward(enc: &EncodedMatrix) -> Result<Dendrogram> {
    let n = enc.rows.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "hierarchical clustering needs at least two rows".into(),
        ));
    }
    // d[i][j] holds 2 * ward cost between active clusters i and j
    let mut d = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..i {
            let v = f64::from(enc.sq_dist(i, j));
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    let mut size = vec![1usize; n];
    let mut node: Vec<usize> = (0..n).collect();
    let mut active: Vec<bool> = vec![true; n];
    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in (0..n).filter(|&i| active[i]) {
            for j in (i + 1..n).filter(|&j| active[j]) {
                let key = (node[i].min(node[j]), node[i].max(node[j]));
                let better = match best {
                    None => true,
                    Some((bd, bi, bj)) => {
                        let bkey = (node[bi].min(node[bj]), node[bi].max(node[bj]));
                        d[i][j] < bd || (d[i][j] == bd && key < bkey)
                    }
                };
                if better {
                    best = Some((d[i][j], i, j));
                }
            }
        }
        let (dij, i, j) = best.expect("two active clusters remain");
        let (ni, nj) = (size[i] as f64, size[j] as f64);
        for k in (0..n).filter(|&k| active[k] && k != i && k != j) {
            let nk = size[k] as f64;
            let v = ((ni + nk) * d[i][k] + (nj + nk) * d[j][k] - nk * dij) / (ni + nj + nk);
            d[i][k] = v;
            d[k][i] = v;
        }
        merges.push(Merge {
            left: node[i].min(node[j]),
            right: node[i].max(node[j]),
            height: dij / 2.0,
            size: size[i] + size[j],
        });
        size[i] += size[j];
        node[i] = n + step;
        active[j] = false;
    }
    Ok(Dendrogram {
        leaves: enc.ids.clone(),
        merges,
    })
}

impl Dendrogram {
    /// Newick text with branch lengths; `name` labels the leaves.
    pub fn to_newick(&self, name: impl Fn(u8) -> String) -> String {
        let n = self.leaves.len();
        fn height(d: &Dendrogram, node: usize) -> f64 {
            let n = d.leaves.len();
            if node < n {
                0.0
            } else {
                d.merges[node - n].height
            }
        }
        fn render(d: &Dendrogram, node: usize, name: &dyn Fn(u8) -> String, out: &mut String) {
            let n = d.leaves.len();
            if node < n {
                out.push_str(&name(d.leaves[node]));
                return;
            }
            let m = d.merges[node - n];
            out.push('(');
            for (k, child) in [m.left, m.right].into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                render(d, child, name, out);
                let _ = write!(out, ":{}", m.height - height(d, child));
            }
            out.push(')');
        }
        let mut s = String::new();
        if n == 1 {
            s.push_str(&name(self.leaves[0]));
        } else {
            render(self, n + self.merges.len() - 1, &name, &mut s);
        }
        s.push(';');
        s
    }
}

/// Cluster label per measure, labels `1..=k` by first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub ids: Vec<u8>,
    pub labels: Vec<usize>,
}

impl Partition {
    /// Relabels arbitrary keys to `1..=k` in order of first appearance.
    pub fn from_keys<K: Ord + Copy>(ids: Vec<u8>, keys: &[K]) -> Self {
        let mut map = BTreeMap::new();
        let labels = keys
            .iter()
            .map(|k| {
                let next = map.len() + 1;
                *map.entry(*k).or_insert(next)
            })
            .collect();
        Self { ids, labels }
    }

    pub fn k(&self) -> usize {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    pub fn label_of(&self, id: u8) -> Option<usize> {
        self.ids
            .iter()
            .position(|&x| x == id)
            .map(|i| self.labels[i])
    }

    /// Members per label, each sorted.
    pub fn clusters(&self) -> Vec<Vec<u8>> {
        let mut out = vec![Vec::new(); self.k()];
        for (&id, &l) in self.ids.iter().zip(&self.labels) {
            out[l - 1].push(id);
        }
        for c in &mut out {
            c.sort_unstable();
        }
        out
    }

    /// The partition induced on `ids`.
    pub fn restrict(&self, ids: &[u8]) -> Result<Self> {
        let keys = ids
            .iter()
            .map(|&id| self.label_of(id).ok_or(Error::IdMismatch))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_keys(ids.to_vec(), &keys))
    }

    /// Union of the clusters touching any of `ids`.
    pub fn union_of_clusters(&self, ids: &[u8]) -> BTreeSet<u8> {
        let labels: BTreeSet<usize> = ids.iter().filter_map(|&i| self.label_of(i)).collect();
        self.ids
            .iter()
            .zip(&self.labels)
            .filter(|(_, l)| labels.contains(l))
            .map(|(&id, _)| id)
            .collect()
    }

    /// Reads `measure,cluster`; measures by id or name, labels renumbered.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty partition file".into()))?;
        if header.replace(' ', "").to_lowercase() != "measure,cluster" {
            return Err(Error::Parse(format!("bad partition header: {header}")));
        }
        let mut ids = Vec::new();
        let mut keys = Vec::new();
        for line in lines {
            let (m, c) = line
                .rsplit_once(',')
                .ok_or_else(|| Error::Parse(format!("bad partition line: {line}")))?;
            let id = resolve(m.trim())?;
            if ids.contains(&id) {
                return Err(Error::Parse(format!("measure {id} listed twice")));
            }
            ids.push(id);
            keys.push(c.trim().to_string());
        }
        let refs: Vec<&str> = keys.iter().map(String::as_str).collect();
        Ok(Self::from_keys(ids, &refs))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("measure,cluster\n");
        for (id, l) in self.ids.iter().zip(&self.labels) {
            let _ = writeln!(s, "{id},{l}");
        }
        s
    }
}

/// Removes the `k - 1` last merges.
pub fn cut(d: &Dendrogram, k: usize) -> Result<Partition> {
    let n = d.leaves.len();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "cut needs 1 <= k <= {n}, got {k}"
        )));
    }
    let mut parent: Vec<usize> = (0..2 * n - 1).collect();
    for (i, m) in d.merges.iter().take(n - k).enumerate() {
        parent[m.left] = n + i;
        parent[m.right] = n + i;
    }
    let root = |mut x: usize| {
        while parent[x] != x {
            x = parent[x];
        }
        x
    };
    let keys: Vec<usize> = (0..n).map(root).collect();
    Ok(Partition::from_keys(d.leaves.clone(), &keys))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KMeansResult {
    pub partition: Partition,
    pub sse: f64,
    pub restart: usize,
    pub iterations: usize,
}

/// Lloyd iterations from `restarts` seeded starts; the lowest SSE wins,
/// the earliest restart on ties. Restart `r` draws from ChaCha8 seeded with
/// `seed` on stream `r`.
pub fn kmeans(enc: &EncodedMatrix, k: usize, seed: u64, restarts: usize) -> Result<KMeansResult> {
    let n = enc.rows.len();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "k-means needs 1 <= k <= {n}, got {k}"
        )));
    }
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let points: Vec<Vec<f64>> = enc
        .rows
        .iter()
        .map(|r| r.iter().map(|&v| f64::from(v)).collect())
        .collect();
    let runs: Vec<(f64, Vec<usize>, usize)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let mut start: Vec<usize> = sample(&mut rng, n, k).into_vec();
            start.sort_unstable();
            lloyd(&points, start.iter().map(|&i| points[i].clone()).collect())
        })
        .collect();
    let (restart, (sse, assign, iterations)) = runs
        .into_iter()
        .enumerate()
        .fold(
            None,
            |best: Option<(usize, (f64, Vec<usize>, usize))>, (r, run)| match best {
                Some((br, b)) if b.0 <= run.0 => Some((br, b)),
                _ => Some((r, run)),
            },
        )
        .expect("at least one restart");
    Ok(KMeansResult {
        partition: Partition::from_keys(enc.ids.clone(), &assign),
        sse,
        restart,
        iterations,
    })
}

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid per point, lowest index on ties.
fn assign(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> Vec<usize> {
    points
        .iter()
        .map(|p| {
            let mut best = (f64::INFINITY, 0);
            for (c, cen) in centroids.iter().enumerate() {
                let d = sq(p, cen);
                if d < best.0 {
                    best = (d, c);
                }
            }
            best.1
        })
        .collect()
}

fn lloyd(points: &[Vec<f64>], mut centroids: Vec<Vec<f64>>) -> (f64, Vec<usize>, usize) {
    let k = centroids.len();
    let dim = points[0].len();
    let max_iter = 100.max(10 * k);
    let mut labels = assign(points, &centroids);
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // farthest point from its own centroid, lowest index on ties
                let mut far = (f64::NEG_INFINITY, 0);
                for (i, p) in points.iter().enumerate() {
                    let d = sq(p, &centroids[labels[i]]);
                    if d > far.0 {
                        far = (d, i);
                    }
                }
                centroids[c] = points[far.1].clone();
                counts[c] = 1;
            }
        }
        let next = assign(points, &centroids);
        if next == labels {
            break;
        }
        labels = next;
    }
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(&labels) {
        counts[l] += 1;
        for (s, x) in sums[l].iter_mut().zip(p) {
            *s += x;
        }
    }
    let sse = points
        .iter()
        .zip(&labels)
        .map(|(p, &l)| {
            let cen: Vec<f64> = sums[l].iter().map(|s| s / counts[l] as f64).collect();
            sq(p, &cen)
        })
        .sum();
    (sse, labels, iterations)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsensusClass {
    pub members: Vec<u8>,
    pub first_cluster: usize,
    pub second_cluster: usize,
    /// `c<first>/p<second>`.
    pub tag: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Residue {
    pub measure: u8,
    pub first_cluster: usize,
    pub second_cluster: usize,
    pub tag: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsensusClasses {
    pub classes: Vec<ConsensusClass>,
    pub residue: Vec<Residue>,
}

impl ConsensusClasses {
    pub fn class_of(&self, id: u8) -> Option<&ConsensusClass> {
        self.classes.iter().find(|c| c.members.contains(&id))
    }
}

/// Non-singleton blocks of the meet of two partitions.
pub fn consensus(first: &Partition, second: &Partition) -> Result<ConsensusClasses> {
    same_ids(first, second)?;
    let mut blocks: BTreeMap<(usize, usize), Vec<u8>> = BTreeMap::new();
    for (&id, &l) in first.ids.iter().zip(&first.labels) {
        let l2 = second.label_of(id).ok_or(Error::IdMismatch)?;
        blocks.entry((l, l2)).or_default().push(id);
    }
    let mut classes = Vec::new();
    let mut residue = Vec::new();
    for ((l1, l2), mut members) in blocks {
        members.sort_unstable();
        if members.len() > 1 {
            classes.push(ConsensusClass {
                members,
                first_cluster: l1,
                second_cluster: l2,
                tag: format!("c{l1}/p{l2}"),
            });
        } else {
            residue.push(Residue {
                measure: members[0],
                first_cluster: l1,
                second_cluster: l2,
                tag: format!("c{l1}/p{l2}"),
            });
        }
    }
    classes.sort_by(|a, b| {
        b.members
            .len()
            .cmp(&a.members.len())
            .then(a.members.cmp(&b.members))
    });
    residue.sort_by_key(|r| r.measure);
    Ok(ConsensusClasses { classes, residue })
}

fn same_ids(a: &Partition, b: &Partition) -> Result<()> {
    let sa: BTreeSet<u8> = a.ids.iter().copied().collect();
    let sb: BTreeSet<u8> = b.ids.iter().copied().collect();
    if sa != sb || sa.len() != a.ids.len() || sb.len() != b.ids.len() {
        return Err(Error::IdMismatch);
    }
    Ok(())
}

/// Rand index and adjusted Rand index.
pub fn rand_scores(a: &Partition, b: &Partition) -> Result<(f64, f64)> {
    same_ids(a, b)?;
    let n = a.ids.len() as u64;
    let c2 = |x: u64| x * x.saturating_sub(1) / 2;
    let mut table: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for (&id, &l) in a.ids.iter().zip(&a.labels) {
        *table
            .entry((l, b.label_of(id).ok_or(Error::IdMismatch)?))
            .or_default() += 1;
    }
    let mut rows: BTreeMap<usize, u64> = BTreeMap::new();
    let mut cols: BTreeMap<usize, u64> = BTreeMap::new();
    for (&(i, j), &v) in &table {
        *rows.entry(i).or_default() += v;
        *cols.entry(j).or_default() += v;
    }
    let total = c2(n);
    if total == 0 {
        return Ok((1.0, 1.0));
    }
    let both: u64 = table.values().map(|&v| c2(v)).sum();
    let sa: u64 = rows.values().map(|&v| c2(v)).sum();
    let sb: u64 = cols.values().map(|&v| c2(v)).sum();
    // pairs together in both plus pairs apart in both
    let agree = total + 2 * both - sa - sb;
    let ri = agree as f64 / total as f64;
    let expected = sa as f64 * sb as f64 / total as f64;
    let max = 0.5 * (sa + sb) as f64;
    let ari = if max == expected {
        if a.restrict(&b.ids)?.labels == b.labels {
            1.0
        } else {
            0.0
        }
    } else {
        (both as f64 - expected) / (max - expected)
    };
    Ok((ri, ari))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RandScores {
    pub rand: f64,
    pub adjusted: f64,
}

/// Measures whose clusters are compared across the two methods.
pub const LIKELIHOOD_FAMILY: [&str; 6] = ["Likelihood index", "II", "EII", "PDI", "IP3E", "IPEE"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaperAgreement {
    /// `None` when the partition misses part of the published measure set.
    pub hierarchical_vs_published: Option<RandScores>,
    pub kmeans_vs_published: Option<RandScores>,
    pub hierarchical_family_union: Vec<u8>,
    pub kmeans_family_union: Vec<u8>,
    pub family_unions_agree: bool,
}

pub fn paper_agreement(hierarchical: &Partition, kmeans: &Partition) -> Result<PaperAgreement> {
    let published = published_ahc_partition();
    let against = |p: &Partition| -> Result<Option<RandScores>> {
        match p.restrict(&published.ids) {
            Ok(r) => {
                let (rand, adjusted) = rand_scores(&r, &published)?;
                Ok(Some(RandScores { rand, adjusted }))
            }
            Err(Error::IdMismatch) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let family: Vec<u8> = LIKELIHOOD_FAMILY
        .iter()
        .map(|n| resolve(n))
        .collect::<Result<_>>()?;
    let hu: Vec<u8> = hierarchical
        .union_of_clusters(&family)
        .into_iter()
        .collect();
    let ku: Vec<u8> = kmeans.union_of_clusters(&family).into_iter().collect();
    Ok(PaperAgreement {
        hierarchical_vs_published: against(hierarchical)?,
        kmeans_vs_published: against(kmeans)?,
        family_unions_agree: hu == ku,
        hierarchical_family_union: hu,
        kmeans_family_union: ku,
    })
}

/// The eight hierarchical clusters as published.
pub const PUBLISHED_AHC_CLUSTERS: [&[&str]; 8] = [
    &["Likelihood index", "II"],
    &["REII", "EII", "PDI", "IP3E", "IPEE"],
    &["Two-way variation support", "Pearl"],
    &[
        "Implication index",
        "Fukuda",
        "Gini",
        "J-measure",
        "Dependency",
        "Weighted dependency",
        "Prevalence",
        "Coverage",
    ],
    &[
        "VT100",
        "Accuracy",
        "Jaccard",
        "Support",
        "Cosine",
        "Recall",
        "Causal dependency",
        "Causal confirm",
        "Causal confidence",
    ],
    &[
        "Sebag",
        "Least contradiction",
        "Descriptive confirmation",
        "Examples rate",
        "Ganascia",
        "Laplace",
        "Confidence",
    ],
    &[
        "Zhang",
        "MGK",
        "Yule's Y",
        "Yule's Q",
        "Goodman",
        "Piatetsky-Shapiro",
        "Correlation coefficient",
    ],
    &[
        "Interest",
        "Informational gain",
        "Collective strength",
        "Cohen",
        "Relative risk",
        "Bayesian factor",
        "Conviction",
        "Factor of certainty",
        "Pavilion",
        "Klosgen",
        "Two-way support",
        "One-way support",
    ],
];

/// The measures the published partition covers, in its order.
pub fn published_measure_set() -> Vec<u8> {
    published_ahc_partition().ids
}

/// All measures computed at `cfg`, overlaid with the published cells and
/// restricted to the published measure set.
pub fn paper_aligned_matrix(cfg: &EvaluationConfig) -> Result<PropertyMatrix> {
    let all: Vec<u8> = registry().iter().map(|d| d.id).collect();
    build_matrix(&all, cfg)?
        .completed_with(&ReferenceMatrix::builtin())
        .select(&published_measure_set())
}

pub fn published_ahc_partition() -> Partition {
    let mut ids = Vec::new();
    let mut keys = Vec::new();
    for (c, names) in PUBLISHED_AHC_CLUSTERS.iter().enumerate() {
        for name in names.iter() {
            ids.push(resolve(name).expect("published name resolves"));
            keys.push(c);
        }
    }
    Partition::from_keys(ids, &keys)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enc(rows: &[&[u8]]) -> EncodedMatrix {
        EncodedMatrix {
            ids: (1..=rows.len() as u8).collect(),
            labels: (0..rows[0].len()).map(|i| format!("c{i}")).collect(),
            rows: rows.iter().map(|r| r.to_vec()).collect(),
        }
    }

    #[test]
    fn identical_pair_merges_first_at_zero() {
        let d = ahc_ward(&enc(&[&[0, 0], &[1, 1], &[0, 0]])).unwrap();
        assert_eq!((d.merges[0].left, d.merges[0].right), (0, 2));
        assert_eq!(d.merges[0].height, 0.0);
        assert_eq!(d.merges.len(), 2);
    }

    #[test]
    fn ward_height_is_sse_increase() {
        // merging {0} and {2} costs |x-y|^2 / 2; then {0,2} with {1}
        let e = enc(&[&[0, 0], &[4, 0], &[1, 0]]);
        let d = ahc_ward(&e).unwrap();
        assert_eq!(d.merges[0].height, 0.5);
        // centroid 0.5, SSE of all three about mean 5/3 minus 0.5
        let total = (25.0 / 9.0) + (49.0 / 9.0) + (4.0 / 9.0);
        assert!((d.merges[1].height - (total - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn equidistant_ties_follow_ids() {
        let e = enc(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let d = ahc_ward(&e).unwrap();
        assert_eq!((d.merges[0].left, d.merges[0].right), (0, 1));
        assert_eq!(d, ahc_ward(&e).unwrap());
    }

    #[test]
    fn cut_extremes() {
        let e = enc(&[&[0, 0], &[1, 1], &[0, 1], &[1, 0]]);
        let d = ahc_ward(&e).unwrap();
        assert_eq!(cut(&d, 1).unwrap().k(), 1);
        assert_eq!(cut(&d, 4).unwrap().labels, vec![1, 2, 3, 4]);
        assert!(cut(&d, 0).is_err());
        assert!(cut(&d, 5).is_err());
    }

    #[test]
    fn newick_shape() {
        let d = ahc_ward(&enc(&[&[0], &[0], &[1]])).unwrap();
        let s = d.to_newick(|id| format!("m{id}"));
        assert_eq!(s, "(m3:0.6666666666666666,(m1:0,m2:0):0.6666666666666666);");
        assert!(s.ends_with(";"));
    }

    #[test]
    fn kmeans_extremes() {
        let e = enc(&[&[0, 0], &[1, 1], &[0, 1], &[1, 0]]);
        let all = kmeans(&e, 4, 7, 3).unwrap();
        assert_eq!(all.sse, 0.0);
        assert_eq!(all.partition.k(), 4);
        let one = kmeans(&e, 1, 7, 3).unwrap();
        assert_eq!(one.partition.k(), 1);
        assert!((one.sse - 2.0).abs() < 1e-12);
        assert!(kmeans(&e, 5, 7, 1).is_err());
        assert_eq!(kmeans(&e, 2, 9, 5).unwrap(), kmeans(&e, 2, 9, 5).unwrap());
    }

    #[test]
    fn consensus_of_self_is_self() {
        let p = Partition::from_keys(vec![1, 2, 3, 4, 5], &[0, 0, 1, 1, 2]);
        let c = consensus(&p, &p).unwrap();
        assert_eq!(c.classes.len(), 2);
        assert_eq!(c.residue.len(), 1);
        assert_eq!(c.residue[0].measure, 5);
    }

    #[test]
    fn consensus_is_the_meet() {
        let ids: Vec<u8> = (1..=6).collect();
        let a = Partition::from_keys(ids.clone(), &[0, 0, 0, 1, 1, 1]);
        let b = Partition::from_keys(ids.clone(), &[0, 0, 1, 1, 2, 2]);
        let c = consensus(&a, &b).unwrap();
        // brute force: i and j share a block iff they share a label in both
        for &i in &ids {
            for &j in &ids {
                let together = a.label_of(i) == a.label_of(j) && b.label_of(i) == b.label_of(j);
                let in_class = c.class_of(i).is_some_and(|cl| cl.members.contains(&j));
                assert_eq!(together && i != j, in_class && i != j);
            }
        }
        let other = Partition::from_keys(vec![1, 2, 3], &[0, 0, 0]);
        assert_eq!(consensus(&a, &other), Err(Error::IdMismatch));
    }

    #[test]
    fn rand_index_by_hand() {
        let ids = vec![1, 2, 3, 4];
        let singletons = Partition::from_keys(ids.clone(), &[0, 1, 2, 3]);
        let one = Partition::from_keys(ids.clone(), &[0, 0, 0, 0]);
        assert_eq!(rand_scores(&singletons, &one).unwrap().0, 0.0);
        assert_eq!(rand_scores(&one, &one).unwrap(), (1.0, 1.0));
        // pair counting by hand on a 6-element fixture:
        // a = {1,2,3}{4,5,6}, b = {1,2}{3,4}{5,6}
        let ids6: Vec<u8> = (1..=6).collect();
        let a = Partition::from_keys(ids6.clone(), &[0, 0, 0, 1, 1, 1]);
        let b = Partition::from_keys(ids6, &[0, 0, 1, 1, 2, 2]);
        let (ri, ari) = rand_scores(&a, &b).unwrap();
        // together in both: 2; sa = 6, sb = 3, total 15
        // agreements 15 + 4 - 6 - 3 = 10
        assert!((ri - 10.0 / 15.0).abs() < 1e-12);
        let expected = 6.0 * 3.0 / 15.0;
        let want = (2.0 - expected) / (4.5 - expected);
        assert!((ari - want).abs() < 1e-12);
    }

    #[test]
    fn partition_csv_round_trip() {
        let p = Partition::from_keys(vec![3, 54, 35], &[0, 1, 0]);
        assert_eq!(Partition::from_csv(&p.to_csv()).unwrap(), p);
        let named = Partition::from_csv("measure,cluster\nSupport,x\nConfidence,y\n").unwrap();
        assert_eq!(named.ids, vec![54, 3]);
        assert!(Partition::from_csv("measure,cluster\n3,1\n3,2\n").is_err());
    }

    #[test]
    fn agreement_of_published_with_itself() {
        let p = published_ahc_partition();
        let a = paper_agreement(&p, &p).unwrap();
        assert_eq!(a.hierarchical_vs_published.unwrap().adjusted, 1.0);
        assert!(a.family_unions_agree);
        assert_eq!(a.hierarchical_family_union.len(), 7);
        let partial = Partition::from_keys(vec![3, 54], &[0, 0]);
        assert!(paper_agreement(&partial, &partial)
            .unwrap()
            .kmeans_vs_published
            .is_none());
    }

    #[test]
    fn published_partition_covers_fifty_two() {
        let p = published_ahc_partition();
        assert_eq!(p.ids.len(), 52);
        assert_eq!(p.k(), 8);
        let distinct: BTreeSet<u8> = p.ids.iter().copied().collect();
        assert_eq!(distinct.len(), 52);
    }
}
