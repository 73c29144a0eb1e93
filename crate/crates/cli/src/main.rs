use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rulecat::analysis::{self, shape_probe};
use rulecat::clustering::{self, Partition};
use rulecat::dedup;
use rulecat::measures::{self, descriptor, registry, resolve, MeasureParams};
use rulecat::miner::{self, ContextPolicy};
use rulecat::properties::{self, EvaluationConfig, Method, PropertyMatrix, ReferenceMatrix};
use rulecat::ContingencyTable;

#[derive(Parser)]
#[command(
    name = "rulecat",
    version,
    about = "Interestingness measures for association rules, their formal properties and a categorization of the measures"
)]
struct Cli {
    /// Worker threads; 0 uses one per core. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure catalog and single-table evaluation
    #[command(subcommand)]
    Measures(MeasuresCmd),
    /// Property matrix construction and reference checks
    #[command(subcommand)]
    Properties(PropertiesCmd),
    /// Extensional aliases, identical property vectors and redundant properties;
    /// without --matrix every measure is computed and completed with the
    /// published cells
    Dedup(DedupArgs),
    /// Complete disjunctive encoding of a property matrix
    Encode(SourceArgs),
    /// Hierarchical, k-means and consensus clustering of the measures
    #[command(subcommand)]
    Cluster(ClusterCmd),
    /// Per-class property summaries with the `?`, `0?`, `1?` tokens
    Profile(ProfileArgs),
    /// Measure values along the number of examples with margins fixed
    Curves(CurvesArgs),
    /// Frequent itemsets and association rules from a basket file
    Mine(MineArgs),
    /// Mined rules scored and ordered by chosen measures
    Rank(RankArgs),
}

#[derive(Subcommand)]
enum MeasuresCmd {
    /// Catalog as CSV: id, name, aliases, orientation, codomain
    List(OutArgs),
    /// Evaluate measures on one table
    Eval(EvalMeasureArgs),
}

#[derive(Subcommand)]
enum PropertiesCmd {
    /// Decide every property for the selected measures
    Matrix(MatrixArgs),
    /// Compare a matrix with the published cells; exit 2 on unexplained differences
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum ClusterCmd {
    /// Ward agglomerative clustering cut into k clusters
    Ahc(AhcArgs),
    /// Best of several seeded k-means runs
    Kmeans(KmeansArgs),
    /// Classes shared by the hierarchical and k-means partitions
    Consensus(KmeansArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutArgs {
    /// Output file; standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ParamArgs {
    /// Fukuda confidence threshold
    #[arg(long = "sigma-c", default_value_t = 0.5)]
    sigma_c: f64,
    /// Gray-Orlowska weight on the interest term
    #[arg(long = "k-weight", default_value_t = 2)]
    k_weight: u32,
    /// Gray-Orlowska weight on the support term
    #[arg(long = "m-weight", default_value_t = 2)]
    m_weight: u32,
}

impl ParamArgs {
    fn params(&self) -> MeasureParams {
        MeasureParams {
            sigma_c: self.sigma_c,
            k_weight: self.k_weight,
            m_weight: self.m_weight,
        }
    }
}

#[derive(Args, Clone)]
struct EvalArgs {
    /// Largest table total enumerated by the property search
    #[arg(long = "nmax", default_value_t = 40)]
    n_max: u64,
    /// Absolute tolerance for value comparisons
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Confidence floor of the curvature property P12
    #[arg(long = "min-conf", default_value_t = 0.5)]
    min_conf: f64,
    /// Largest scale factor for P13 and P18
    #[arg(long = "k-max", default_value_t = 4)]
    k_max: u64,
    /// Growth ladder for the P19 dispersion heuristic
    #[arg(long = "p19-scales", value_delimiter = ',', default_values_t = vec![1u64, 4, 16, 64, 256])]
    p19_scales: Vec<u64>,
    /// Dispersion at or above which P19 is 1
    #[arg(long = "p19-floor", default_value_t = 1e-3)]
    p19_floor: f64,
    #[command(flatten)]
    params: ParamArgs,
}

impl EvalArgs {
    fn config(&self) -> Result<EvaluationConfig> {
        let cfg = EvaluationConfig {
            n_max: self.n_max,
            tol: self.tol,
            min_conf: self.min_conf,
            k_max: self.k_max,
            p19_scales: self.p19_scales.clone(),
            p19_dispersion_floor: self.p19_floor,
            params: self.params.params(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct ReferenceArgs {
    /// Reference cells CSV `measure,property,value,source`; built-in when absent
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Waivers CSV `measure,property,justification`
    #[arg(long, requires = "reference")]
    waivers: Option<PathBuf>,
}

impl ReferenceArgs {
    fn load(&self) -> Result<ReferenceMatrix> {
        Ok(match &self.reference {
            Some(p) => ReferenceMatrix::from_files(p, self.waivers.as_deref())?,
            None => ReferenceMatrix::builtin(),
        })
    }
}

/// A matrix read from disk or the published 52-measure matrix built on the fly.
#[derive(Args)]
struct SourceArgs {
    /// Matrix CSV `measure,P1..P19`; when absent, all measures are computed,
    /// completed with the published cells and restricted to the published set
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[command(flatten)]
    eval: EvalArgs,
    #[command(flatten)]
    out: OutArgs,
}

impl SourceArgs {
    fn matrix(&self) -> Result<PropertyMatrix> {
        match &self.matrix {
            Some(p) => {
                let text = read(p)?;
                Ok(PropertyMatrix::from_csv(&text, Method::Reference)?)
            }
            None => Ok(clustering::paper_aligned_matrix(&self.eval.config()?)?),
        }
    }
}

#[derive(Args)]
struct EvalMeasureArgs {
    /// Table `n_xy,n_xny,n_nxy,n_nxny`
    #[arg(long, allow_hyphen_values = true)]
    table: String,
    /// Measure id or name; repeat for several, all when absent
    #[arg(long = "measure")]
    measures: Vec<String>,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct MatrixArgs {
    /// Comma-separated measure ids or names; all when absent
    #[arg(long, value_delimiter = ',')]
    measures: Vec<String>,
    /// Overlay the published cells on the computed ones
    #[arg(long)]
    complete: bool,
    /// Per-cell JSON with method, bound, witness and landmark
    #[arg(long)]
    detail: Option<PathBuf>,
    #[command(flatten)]
    reference: ReferenceArgs,
    #[command(flatten)]
    eval: EvalArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Matrix CSV to check; all measures are computed when absent
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[command(flatten)]
    reference: ReferenceArgs,
    #[command(flatten)]
    eval: EvalArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct DedupArgs {
    /// Skip the extensional alias search over enumerated tables
    #[arg(long)]
    no_aliases: bool,
    #[command(flatten)]
    source: SourceArgs,
}

#[derive(Args)]
struct AhcArgs {
    /// Number of clusters
    #[arg(long, default_value_t = 8)]
    cut: usize,
    /// Merge list as JSON
    #[arg(long)]
    dendrogram: Option<PathBuf>,
    /// Dendrogram as Newick text
    #[arg(long)]
    newick: Option<PathBuf>,
    #[command(flatten)]
    source: SourceArgs,
}

#[derive(Args)]
struct KmeansArgs {
    /// Number of clusters
    #[arg(long, default_value_t = 8)]
    k: usize,
    /// Seed of the ChaCha8 generator; restart r draws from stream r
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Independent k-means starts
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[command(flatten)]
    source: SourceArgs,
}

#[derive(Args)]
struct ProfileArgs {
    /// Partition CSV `measure,cluster`; the consensus classes when absent
    #[arg(long)]
    partition: Option<PathBuf>,
    /// Clusters for the consensus default
    #[arg(long, default_value_t = 8)]
    k: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[command(flatten)]
    source: SourceArgs,
}

#[derive(Args)]
struct CurvesArgs {
    /// Measure id or name; repeat for several
    #[arg(long = "measure", required = true)]
    measures: Vec<String>,
    #[arg(long = "nx", default_value_t = 174)]
    n_x: u64,
    #[arg(long = "ny", default_value_t = 400)]
    n_y: u64,
    #[arg(long, default_value_t = 600)]
    n: u64,
    /// Tolerance of the shape probe
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Directory for one `<id>.csv` per measure and `manifest.json`
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct MiningArgs {
    /// Basket file: one basket per line, whitespace-separated items
    #[arg(long)]
    input: PathBuf,
    /// Minimum support as a fraction of baskets
    #[arg(long, default_value_t = 0.1)]
    minsupp: f64,
    /// Minimum confidence
    #[arg(long, default_value_t = 0.5)]
    minconf: f64,
    /// Mine below one basket of support even with many items
    #[arg(long)]
    allow_unbounded: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct MineArgs {
    #[command(flatten)]
    mining: MiningArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    mining: MiningArgs,
    /// Measures to score, comma-separated ids or names
    #[arg(
        long = "measures",
        value_delimiter = ',',
        default_value = "Support,Confidence"
    )]
    measures: Vec<String>,
    /// Score with every member of a consensus class given as a
    /// comma-separated list; overrides --measures
    #[arg(long, value_delimiter = ',')]
    class: Vec<String>,
    /// Ranking measure; the first scored measure when absent
    #[arg(long)]
    by: Option<String>,
    /// Use the mined rules as the population for PDI
    #[arg(long)]
    context: bool,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    out: OutArgs,
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

fn write_file(p: &Path, text: &str) -> Result<()> {
    std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))
}

fn emit(out: &OutArgs, text: &str) -> Result<()> {
    match &out.out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn ids(names: &[String]) -> Result<Vec<u8>> {
    Ok(names
        .iter()
        .map(|n| resolve(n.trim()))
        .collect::<Result<_, _>>()?)
}

fn name(id: u8) -> String {
    descriptor(id)
        .map(|d| d.canonical_name.to_string())
        .unwrap_or_else(|_| id.to_string())
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn measures_list(out: &OutArgs) -> Result<u8> {
    let mut s = String::from("id,name,aliases,orientation,codomain\n");
    for d in registry() {
        let orientation = match d.orientation {
            measures::Orientation::Symmetric => "symmetric",
            measures::Orientation::Asymmetric => "asymmetric",
        };
        let codomain = d.codomain.map(|c| c.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            d.id,
            csv_field(d.canonical_name),
            csv_field(&d.alias_names.join("; ")),
            orientation,
            csv_field(&codomain)
        );
    }
    emit(out, &s)?;
    Ok(0)
}

fn measures_eval(a: &EvalMeasureArgs) -> Result<u8> {
    let t: ContingencyTable = a.table.parse()?;
    let params = a.params.params();
    params.validate()?;
    if a.measures.len() == 1 {
        let id = resolve(&a.measures[0])?;
        let v = measures::evaluate(id, &t, &params, None)?;
        emit(&a.out, &format!("{v}\n"))?;
        return Ok(0);
    }
    let selected = if a.measures.is_empty() {
        registry()
            .iter()
            .filter(|d| !d.needs_context)
            .map(|d| d.id)
            .collect()
    } else {
        ids(&a.measures)?
    };
    let mut s = String::from("id,name,value\n");
    for id in selected {
        let v = measures::evaluate(id, &t, &params, None)?;
        let _ = writeln!(s, "{id},{},{v}", csv_field(&name(id)));
    }
    emit(&a.out, &s)?;
    Ok(0)
}

fn properties_matrix(a: &MatrixArgs) -> Result<u8> {
    let cfg = a.eval.config()?;
    let selected = if a.measures.is_empty() {
        registry().iter().map(|d| d.id).collect()
    } else {
        ids(&a.measures)?
    };
    let mut m = properties::build_matrix(&selected, &cfg)?;
    if a.complete {
        m = m.completed_with(&a.reference.load()?);
    }
    if let Some(p) = &a.detail {
        write_file(p, &m.to_json_detail()?)?;
    }
    for (measure, p) in m.gaps() {
        eprintln!("undecided cell ({measure}, {p})");
    }
    emit(&a.out, &m.to_csv())?;
    Ok(0)
}

fn properties_verify(a: &VerifyArgs) -> Result<u8> {
    let m = match &a.matrix {
        Some(p) => PropertyMatrix::from_csv(&read(p)?, Method::Computed)?,
        None => {
            let all: Vec<u8> = registry().iter().map(|d| d.id).collect();
            properties::build_matrix(&all, &a.eval.config()?)?
        }
    };
    let report = properties::compare_to_reference(&m, &a.reference.load()?)?;
    emit(&a.out, &json(&report)?)?;
    eprintln!(
        "checked {} cells: {} waived, {} unexplained",
        report.checked,
        report.waived.len(),
        report.unexplained.len()
    );
    Ok(if report.is_clean() { 0 } else { 2 })
}

fn dedup_cmd(a: &DedupArgs) -> Result<u8> {
    #[derive(Serialize)]
    struct Report {
        aliases: Option<Vec<Vec<String>>>,
        identical_groups: Vec<Vec<u8>>,
        published_comparison: dedup::GroupComparison,
        redundant_properties: Vec<(String, String)>,
        representatives: Vec<u8>,
    }
    let cfg = a.source.eval.config()?;
    let aliases = if a.no_aliases {
        None
    } else {
        let g = dedup::extensional_duplicates(&cfg)?;
        let variants = measures::variants::formula_variants();
        Some(
            g.duplicates()
                .map(|grp| {
                    grp.iter()
                        .map(|k| {
                            variants
                                .iter()
                                .find(|v| v.key == *k)
                                .map(|v| match k.variant {
                                    0 => v.name.to_string(),
                                    i => format!("{} (variant {i})", v.name),
                                })
                                .unwrap_or_else(|| format!("{}.{}", k.measure, k.variant))
                        })
                        .collect()
                })
                .collect(),
        )
    };
    let m = match &a.source.matrix {
        Some(_) => a.source.matrix()?,
        None => {
            let all: Vec<u8> = registry().iter().map(|d| d.id).collect();
            properties::build_matrix(&all, &cfg)?.completed_with(&ReferenceMatrix::builtin())
        }
    };
    let g = dedup::identical_property_groups(&m)?;
    let report = Report {
        aliases,
        identical_groups: g.duplicates().map(<[u8]>::to_vec).collect(),
        published_comparison: dedup::compare_with_published(&g),
        redundant_properties: dedup::redundant_properties(&m)?
            .into_iter()
            .map(|(p, q)| (p.to_string(), q.to_string()))
            .collect(),
        representatives: g.representatives.clone(),
    };
    emit(&a.source.out, &json(&report)?)?;
    Ok(0)
}

fn encode_cmd(a: &SourceArgs) -> Result<u8> {
    let enc = clustering::disjunctive_encode(&a.matrix()?)?;
    emit(&a.out, &enc.to_csv())?;
    Ok(0)
}

fn ahc_cmd(a: &AhcArgs) -> Result<u8> {
    let enc = clustering::disjunctive_encode(&a.source.matrix()?)?;
    let d = clustering::ahc_ward(&enc)?;
    if let Some(p) = &a.dendrogram {
        write_file(p, &json(&d)?)?;
    }
    if let Some(p) = &a.newick {
        write_file(p, &format!("{}\n", d.to_newick(|id| id.to_string())))?;
    }
    let part = clustering::cut(&d, a.cut)?;
    if let Ok(r) = part.restrict(&clustering::published_measure_set()) {
        let (ri, ari) = clustering::rand_scores(&r, &clustering::published_ahc_partition())?;
        eprintln!("agreement with the published partition: rand {ri:.4}, adjusted {ari:.4}");
    }
    emit(&a.source.out, &part.to_csv())?;
    Ok(0)
}

fn kmeans_run(a: &KmeansArgs) -> Result<(clustering::EncodedMatrix, clustering::KMeansResult)> {
    let enc = clustering::disjunctive_encode(&a.source.matrix()?)?;
    let r = clustering::kmeans(&enc, a.k, a.seed, a.restarts)?;
    Ok((enc, r))
}

fn kmeans_cmd(a: &KmeansArgs) -> Result<u8> {
    let (_, r) = kmeans_run(a)?;
    eprintln!("best restart {} with SSE {}", r.restart, r.sse);
    emit(&a.source.out, &r.partition.to_csv())?;
    Ok(0)
}

fn consensus_of(
    enc: &clustering::EncodedMatrix,
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<(Partition, Partition, clustering::ConsensusClasses)> {
    let d = clustering::ahc_ward(enc)?;
    let h = clustering::cut(&d, k)?;
    let km = clustering::kmeans(enc, k, seed, restarts)?.partition;
    let c = clustering::consensus(&h, &km)?;
    Ok((h, km, c))
}

fn consensus_cmd(a: &KmeansArgs) -> Result<u8> {
    #[derive(Serialize)]
    struct Report {
        consensus: clustering::ConsensusClasses,
        hierarchical: Partition,
        kmeans: Partition,
        agreement: clustering::PaperAgreement,
    }
    let enc = clustering::disjunctive_encode(&a.source.matrix()?)?;
    let (h, km, c) = consensus_of(&enc, a.k, a.seed, a.restarts)?;
    let agreement = clustering::paper_agreement(&h, &km)?;
    emit(
        &a.source.out,
        &json(&Report {
            consensus: c,
            hierarchical: h,
            kmeans: km,
            agreement,
        })?,
    )?;
    Ok(0)
}

fn profile_cmd(a: &ProfileArgs) -> Result<u8> {
    let m = a.source.matrix()?;
    let part = match &a.partition {
        Some(p) => Partition::from_csv(&read(p)?)?,
        None => {
            let enc = clustering::disjunctive_encode(&m)?;
            let (_, _, c) = consensus_of(&enc, a.k, a.seed, a.restarts)?;
            let mut members = Vec::new();
            let mut keys = Vec::new();
            for (i, cl) in c.classes.iter().enumerate() {
                for &id in &cl.members {
                    members.push(id);
                    keys.push(i);
                }
            }
            Partition::from_keys(members, &keys)
        }
    };
    let profiles = analysis::class_profile(&m, &part)?;
    for p in &profiles {
        eprintln!(
            "C{}: {}",
            p.class,
            p.members
                .iter()
                .map(|&i| name(i))
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    emit(&a.source.out, &analysis::profiles_to_csv(&profiles))?;
    Ok(0)
}

fn curves_cmd(a: &CurvesArgs) -> Result<u8> {
    #[derive(Serialize)]
    struct Entry {
        measure: u8,
        name: String,
        file: Option<String>,
        landmarks: Vec<analysis::Landmark>,
        landmark_values: Vec<(analysis::LandmarkState, measures::MeasureValue)>,
        shape: Option<analysis::Shape>,
    }
    let params = a.params.params();
    params.validate()?;
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut manifest = Vec::new();
    for id in ids(&a.measures)? {
        let s = analysis::curve(id, a.n_x, a.n_y, a.n, &params, None)?;
        let lv = analysis::landmark_values(id, a.n_x, a.n_y, a.n, &params, None)?;
        let file = match &a.out_dir {
            Some(dir) => {
                let f = format!("{id}.csv");
                write_file(&dir.join(&f), &s.to_csv())?;
                Some(f)
            }
            None => None,
        };
        manifest.push(Entry {
            measure: id,
            name: name(id),
            file,
            landmarks: s.landmarks.clone(),
            landmark_values: lv.into_iter().collect(),
            shape: shape_probe(&s, a.tol).ok(),
        });
    }
    let text = json(&manifest)?;
    match &a.out_dir {
        Some(dir) => write_file(&dir.join("manifest.json"), &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn mined(a: &MiningArgs) -> Result<(miner::TransactionDb, Vec<miner::MinedRule>)> {
    let db = miner::load_transactions_path(&a.input)?;
    let f = miner::apriori_with(&db, a.minsupp, a.allow_unbounded)?;
    let rules = miner::generate_rules(&f, &db, a.minconf)?;
    Ok((db, rules))
}

fn report_text(r: &miner::RankedReport, db: &miner::TransactionDb, f: Format) -> Result<String> {
    Ok(match f {
        Format::Csv => r.to_csv(db)?,
        Format::Json => {
            let mut s = r.to_json(db)?;
            s.push('\n');
            s
        }
    })
}

fn mine_cmd(a: &MineArgs) -> Result<u8> {
    let (db, rules) = mined(&a.mining)?;
    eprintln!(
        "{} baskets, {} items, {} rules",
        db.n_baskets(),
        db.n_items(),
        rules.len()
    );
    let support = resolve("Support")?;
    let confidence = resolve("Confidence")?;
    // keep mining order: rank by nothing but the rule key
    let mut report = miner::score_rules(
        rules.clone(),
        &[support, confidence],
        support,
        &MeasureParams::default(),
        ContextPolicy::None,
    )?;
    let scores: std::collections::BTreeMap<_, _> = report
        .rules
        .drain(..)
        .map(|r| ((r.premise.clone(), r.conclusion.clone()), r.scores))
        .collect();
    report.rules = rules
        .into_iter()
        .map(|mut r| {
            r.scores = scores[&(r.premise.clone(), r.conclusion.clone())].clone();
            r
        })
        .collect();
    emit(&a.out, &report_text(&report, &db, a.mining.format)?)?;
    Ok(0)
}

fn rank_cmd(a: &RankArgs) -> Result<u8> {
    let selection = if a.class.is_empty() {
        ids(&a.measures)?
    } else {
        ids(&a.class)?
    };
    if selection.is_empty() {
        bail!("no measures selected");
    }
    let by = match &a.by {
        Some(n) => resolve(n)?,
        None => selection[0],
    };
    let (db, rules) = mined(&a.mining)?;
    let policy = if a.context {
        ContextPolicy::MinedRules
    } else {
        ContextPolicy::None
    };
    let report = miner::score_rules(rules, &selection, by, &a.params.params(), policy)?;
    emit(&a.out, &report_text(&report, &db, a.mining.format)?)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match &cli.command {
        Command::Measures(MeasuresCmd::List(o)) => measures_list(o),
        Command::Measures(MeasuresCmd::Eval(a)) => measures_eval(a),
        Command::Properties(PropertiesCmd::Matrix(a)) => properties_matrix(a),
        Command::Properties(PropertiesCmd::Verify(a)) => properties_verify(a),
        Command::Dedup(a) => dedup_cmd(a),
        Command::Encode(a) => encode_cmd(a),
        Command::Cluster(ClusterCmd::Ahc(a)) => ahc_cmd(a),
        Command::Cluster(ClusterCmd::Kmeans(a)) => kmeans_cmd(a),
        Command::Cluster(ClusterCmd::Consensus(a)) => consensus_cmd(a),
        Command::Profile(a) => profile_cmd(a),
        Command::Curves(a) => curves_cmd(a),
        Command::Mine(a) => mine_cmd(a),
        Command::Rank(a) => rank_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
