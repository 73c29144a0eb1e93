use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Symmetric,
    Asymmetric,
}

/// Closed interval bounding every defined value, infinite ends allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Codomain {
    pub lo: f64,
    pub hi: f64,
}

impl Codomain {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

impl std::fmt::Display for Codomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let end = |x: f64| {
            if x == f64::INFINITY {
                "+inf".to_string()
            } else if x == f64::NEG_INFINITY {
                "-inf".to_string()
            } else {
                format!("{x}")
            }
        };
        write!(f, "[{}, {}]", end(self.lo), end(self.hi))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureDescriptor {
    pub id: u8,
    pub canonical_name: &'static str,
    pub alias_names: &'static [&'static str],
    pub orientation: Orientation,
    /// Built on a probabilistic model of the counts.
    pub declared_p17: bool,
    pub declared_p19_override: Option<u8>,
    /// Names of the parameters this measure reads.
    pub params_schema: &'static [&'static str],
    /// `None` when no useful bound is known.
    pub codomain: Option<Codomain>,
    /// Reads absolute counts rather than frequencies only.
    pub uses_counts: bool,
    pub needs_context: bool,
    pub note: Option<&'static str>,
}

impl MeasureDescriptor {
    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        std::iter::once(self.canonical_name).chain(self.alias_names.iter().copied())
    }
}

pub const MEASURE_COUNT: usize = 61;

const INF: f64 = f64::INFINITY;

const fn cd(lo: f64, hi: f64) -> Option<Codomain> {
    Some(Codomain { lo, hi })
}

struct Row {
    id: u8,
    name: &'static str,
    aliases: &'static [&'static str],
    sym: bool,
    codomain: Option<Codomain>,
}

const fn row(
    id: u8,
    name: &'static str,
    aliases: &'static [&'static str],
    sym: bool,
    codomain: Option<Codomain>,
) -> Row {
    Row {
        id,
        name,
        aliases,
        sym,
        codomain,
    }
}

#[rustfmt::skip]
const ROWS: [Row; MEASURE_COUNT] = [
    row(1, "Correlation coefficient", &["phi-coefficient", "phi"], true, cd(-1.0, 1.0)),
    row(2, "Cohen", &["Kappa"], true, cd(-1.0, 1.0)),
    row(3, "Confidence", &["Precision"], false, cd(0.0, 1.0)),
    row(4, "Causal confidence", &[], false, cd(0.0, 1.0)),
    row(5, "Centred confidence", &["Pavillon", "Pavilion", "Added value", "Centered confidence"], false, cd(-1.0, 1.0)),
    row(6, "Descriptive-confirmed confidence", &["Ganascia", "Descriptive confirm confidence"], false, cd(-1.0, 1.0)),
    row(7, "Causal-confirm confidence", &["Causal confirmed confidence"], false, cd(-1.0, 1.0)),
    row(8, "Causal confirm", &["Causal confirmation"], false, cd(-2.0, 1.0)),
    row(9, "Descriptive confirm", &["Descriptive confirmation"], false, cd(-1.0, 1.0)),
    row(10, "Conviction", &[], false, cd(0.0, INF)),
    row(11, "Cosine", &["Ochiai", "Cosinus"], true, cd(0.0, 1.0)),
    row(12, "Coverage", &[], false, cd(0.0, 1.0)),
    row(13, "Czekanowski-Dice", &["F-measure", "Czekanowski"], true, cd(0.0, 1.0)),
    row(14, "Dependency", &[], false, cd(0.0, 1.0)),
    row(15, "Causal dependency", &["Putative causal dependency"], false, None),
    row(16, "Weighted dependency", &["Gray and Orlowska's interestingness weighting dependency", "Gray-Orlowska"], false, cd(-1.0, 1.0)),
    row(17, "Bayes factor", &["Odd multiplier", "Odd-multiplier", "Bayesian factor"], false, cd(0.0, INF)),
    row(18, "Certainty factor", &["Loevinger", "Satisfaction", "Factor of certainty"], false, cd(-INF, 1.0)),
    row(19, "Negative reliability", &[], false, cd(0.0, 1.0)),
    row(20, "Collective strength", &[], true, cd(0.0, INF)),
    row(21, "Fukuda", &[], false, None),
    row(22, "Informational gain", &["Informationnel gain"], true, cd(-INF, INF)),
    row(23, "Gini", &["Gini index"], false, cd(0.0, 1.0)),
    row(24, "Goodman", &["Goodman-Kruskal"], true, cd(-1.0, 1.0)),
    row(25, "Implication index", &[], false, None),
    row(26, "IPEE", &["Probabilistic intensity of deviation from equilibrium", "Probabilistic index of deviation from equilibrium"], false, cd(0.0, 1.0)),
    row(27, "IP3E", &["Entropic probabilistic intensity of deviation from equilibrium", "Probabilistic index of deviation from the entropic equilibrium"], false, cd(0.0, 1.224_744_871_391_589_1)),
    row(28, "PDI", &["Probabilistic discriminant index"], false, cd(0.0, 1.0)),
    row(29, "Mutual information", &[], false, cd(0.0, 1.0)),
    row(30, "Intensity of implication", &["II"], false, cd(0.0, 1.0)),
    row(31, "Entropic intensity of implication", &["EII", "IIE"], false, cd(0.0, 1.0)),
    row(32, "Entropic intensity of revised implication", &["REII", "IIER"], false, cd(0.0, 1.0)),
    row(33, "Likelihood index", &["Likelihood discriminant index", "Likelihood link index", "Likelihood index link"], true, cd(0.0, 1.0)),
    row(34, "Lift", &["Interest"], true, cd(0.0, INF)),
    row(35, "Jaccard", &[], true, cd(0.0, 1.0)),
    row(36, "J-measure", &[], false, None),
    row(37, "Klosgen", &[], false, cd(-1.0, 1.0)),
    row(38, "Kulczynski", &["Agreement and disagreement index"], true, cd(0.0, INF)),
    row(39, "Laplace", &[], false, cd(0.0, 1.0)),
    row(40, "Leverage", &[], false, cd(-1.0, 1.0)),
    row(41, "MGK", &["M_GK"], false, cd(-1.0, 1.0)),
    row(42, "Least contradiction", &["Surprise"], false, cd(-INF, 1.0)),
    row(43, "Novelty", &[], true, cd(-0.25, 0.25)),
    row(44, "Pearl", &[], true, cd(0.0, 1.0)),
    row(45, "Piatetsky-Shapiro", &[], true, None),
    row(46, "Accuracy", &["Causal support"], true, cd(0.0, 1.0)),
    row(47, "Prevalence", &[], false, cd(0.0, 1.0)),
    row(48, "Yule's Q", &[], true, cd(-1.0, 1.0)),
    row(49, "Recall", &[], false, cd(0.0, 1.0)),
    row(50, "Odds ratio", &[], true, cd(0.0, INF)),
    row(51, "Relative risk", &[], false, cd(0.0, INF)),
    row(52, "Sebag-Schoenauer", &["Sebag"], false, cd(0.0, INF)),
    row(53, "Specificity", &[], false, cd(0.0, 1.0)),
    row(54, "Support", &["Russel and Rao index"], true, cd(0.0, 1.0)),
    row(55, "One-way support", &["Yao and Liu's one way support"], false, None),
    row(56, "Two-way support", &["Yao and Liu's two way support"], true, None),
    row(57, "Examples rate", &["Examples and counter-examples rate"], false, cd(-INF, 1.0)),
    row(58, "VT100", &["Test value VT100"], true, cd(-INF, INF)),
    row(59, "Two-way support variation", &["Yao and Liu's two way support variation", "Support variation", "Two-way variation support"], true, cd(0.0, 1.0)),
    row(60, "Yule's Y", &[], true, cd(-1.0, 1.0)),
    row(61, "Zhang", &[], false, cd(-1.0, 1.0)),
];

const PROBABILISTIC: [u8; 8] = [26, 27, 28, 30, 31, 32, 33, 58];
const COUNT_BASED: [u8; 12] = [21, 25, 26, 27, 28, 30, 31, 32, 33, 39, 45, 58];

/// Measures whose values saturate towards 1 as the data grows.
const NON_DISCRIMINANT: [u8; 3] = [26, 30, 33];

fn p19_override(id: u8) -> Option<u8> {
    NON_DISCRIMINANT.contains(&id).then_some(0)
}

fn note(id: u8) -> Option<&'static str> {
    match id {
        5 => Some("evaluated as p(XY)/p(X) - p(Y), the form shared by its aliases"),
        16 => Some("exponents k and m default to 2"),
        20 => Some("evaluated in the symmetric form with p(XbarYbar) in both factors"),
        21 => Some("threshold sigma_c defaults to 0.5"),
        24 => Some("second factor is Yule's Q on the cell counts, kept as printed"),
        36 => Some("logarithms in base 2"),
        58 => Some("hypergeometric parameters rounded from 100 p(.)"),
        _ => None,
    }
}

fn params_schema(id: u8) -> &'static [&'static str] {
    match id {
        16 => &["k_weight", "m_weight"],
        21 => &["sigma_c"],
        _ => &[],
    }
}

pub fn registry() -> &'static [MeasureDescriptor] {
    static REGISTRY: OnceLock<Vec<MeasureDescriptor>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        ROWS.iter()
            .map(|r| MeasureDescriptor {
                id: r.id,
                canonical_name: r.name,
                alias_names: r.aliases,
                orientation: if r.sym {
                    Orientation::Symmetric
                } else {
                    Orientation::Asymmetric
                },
                declared_p17: PROBABILISTIC.contains(&r.id),
                declared_p19_override: p19_override(r.id),
                params_schema: params_schema(r.id),
                codomain: r.codomain,
                uses_counts: COUNT_BASED.contains(&r.id),
                needs_context: r.id == 28,
                note: note(r.id),
            })
            .collect()
    })
}

pub fn descriptor(id: u8) -> Result<&'static MeasureDescriptor> {
    if (1..=MEASURE_COUNT as u8).contains(&id) {
        Ok(&registry()[id as usize - 1])
    } else {
        Err(Error::UnknownMeasure(id.to_string()))
    }
}

pub(crate) fn normalize_name(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

/// Resolves a canonical name, alias or numeric id.
pub fn resolve(name: &str) -> Result<u8> {
    if let Ok(id) = name.trim().parse::<u8>() {
        return descriptor(id).map(|d| d.id);
    }
    let key = normalize_name(name);
    if key.is_empty() {
        return Err(Error::UnknownMeasure(name.to_string()));
    }
    registry()
        .iter()
        .find(|d| d.names().any(|n| normalize_name(n) == key))
        .map(|d| d.id)
        .ok_or_else(|| Error::UnknownMeasure(name.to_string()))
}
