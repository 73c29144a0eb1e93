use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rulecat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rulecat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const ROWS: &str = "\
measure,P1,P2,P3,P4,P5,P6,P7,P8,P9,P10,P11,P12,P13,P14,P15,P16,P17,P18,P19
Confidence,1,1,0,1,0,0,0,1,1,0,0,2,0,0,1,0,0,0,1
Laplace,1,1,0,1,0,0,0,1,1,0,0,2,0,0,0,0,0,1,1
Lift,0,1,1,1,1,0,1,0,0,1,1,0,0,0,0,0,0,0,1
Conviction,1,1,1,1,1,0,1,0,0,1,1,1,0,0,0,0,0,0,1
Yule's Q,0,1,1,1,1,0,1,0,0,1,1,1,0,1,1,1,0,0,1
Yule's Y,0,1,1,1,1,0,1,0,0,1,1,1,0,1,1,1,0,0,1
";

fn write_matrix(dir: &Path) -> String {
    let p = dir.join("m.csv");
    fs::write(&p, ROWS).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn single_measure_prints_the_bare_value() {
    let o = rulecat(&[
        "measures",
        "eval",
        "--table",
        "40,10,20,30",
        "--measure",
        "Confidence",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "0.8\n");
}

#[test]
fn aliases_resolve_on_the_command_line() {
    let a = rulecat(&[
        "measures",
        "eval",
        "--table",
        "7,3,11,19",
        "--measure",
        "Russel and Rao index",
    ]);
    let b = rulecat(&[
        "measures",
        "eval",
        "--table",
        "7,3,11,19",
        "--measure",
        "Support",
    ]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn catalog_lists_every_measure() {
    let o = rulecat(&["measures", "list"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 62);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&rulecat(&["--help"])), 0);
    assert_eq!(code(&rulecat(&["--version"])), 0);
    assert_eq!(code(&rulecat(&["no-such-command"])), 1);
    assert_eq!(code(&rulecat(&["measures", "eval", "--table", "1,2,3"])), 1);
    assert_eq!(
        code(&rulecat(&[
            "measures",
            "eval",
            "--table",
            "1,2,3,4",
            "--measure",
            "Nope"
        ])),
        1
    );
    assert_eq!(
        code(&rulecat(&[
            "measures",
            "eval",
            "--table",
            "1,2,3,4",
            "--measure",
            "PDI"
        ])),
        1
    );
}

#[test]
fn encoding_has_39_columns() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_matrix(dir.path());
    let o = rulecat(&["encode", "--matrix", &m]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 40);
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn clustering_outputs_are_repeatable_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_matrix(dir.path());
    let run = |jobs: &str| {
        let nwk = dir.path().join(format!("t{jobs}.nwk"));
        let o = rulecat(&[
            "--jobs",
            jobs,
            "cluster",
            "ahc",
            "--matrix",
            &m,
            "--cut",
            "3",
            "--newick",
            nwk.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        (stdout(&o), fs::read_to_string(nwk).unwrap())
    };
    let one = run("1");
    assert_eq!(one, run("3"));
    let labels: Vec<&str> = one.0.lines().skip(1).collect();
    assert_eq!(labels.len(), 6);
    assert!(one.1.trim_end().ends_with(';'));

    let km = |jobs: &str| {
        stdout(&rulecat(&[
            "--jobs", jobs, "cluster", "kmeans", "--matrix", &m, "--k", "3",
        ]))
    };
    assert_eq!(km("1"), km("4"));
}

#[test]
fn consensus_and_profile_from_a_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_matrix(dir.path());
    let o = rulecat(&["cluster", "consensus", "--matrix", &m, "--k", "3"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["consensus"]["classes"].is_array());
    assert!(v["agreement"]["hierarchical_vs_published"].is_null());

    let part = dir.path().join("p.csv");
    fs::write(
        &part,
        "measure,cluster\nYule's Q,1\nYule's Y,1\nConfidence,2\nLaplace,2\nLift,2\n",
    )
    .unwrap();
    let o = rulecat(&[
        "profile",
        "--matrix",
        &m,
        "--partition",
        part.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "property,C1,C2");
    assert_eq!(lines[1], "P1,0,1?");
    assert_eq!(lines[18], "P18,0,0?");
}

#[test]
fn curves_write_one_file_per_measure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curves");
    let o = rulecat(&[
        "curves",
        "--measure",
        "Support",
        "--measure",
        "Yule's Q",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let support = fs::read_to_string(out.join("54.csv")).unwrap();
    assert_eq!(support.lines().next(), Some("n_xy,value"));
    assert_eq!(support.lines().count(), 176);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest[0]["shape"], "linear");
}

fn baskets(dir: &Path) -> String {
    let p = dir.join("b.txt");
    fs::write(&p, "a b\na b\na c\n").unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn mining_reports_hand_counted_rules() {
    let dir = tempfile::tempdir().unwrap();
    let b = baskets(dir.path());
    let o = rulecat(&[
        "mine",
        "--input",
        &b,
        "--minsupp",
        "0.3",
        "--minconf",
        "0.9",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "premise,conclusion,n_xy,n_xny,n_nxy,n_nxny,Support,Confidence\n\
         b,a,2,0,1,0,0.6666666666666666,1\n\
         c,a,1,0,2,0,0.3333333333333333,1\n"
    );
}

#[test]
fn ranking_orders_by_the_chosen_measure() {
    let dir = tempfile::tempdir().unwrap();
    let b = baskets(dir.path());
    let o = rulecat(&[
        "rank",
        "--input",
        &b,
        "--minsupp",
        "0.3",
        "--minconf",
        "0",
        "--measures",
        "Confidence,Support",
        "--by",
        "Support",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let order: Vec<(String, String)> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            (
                r["premise"].as_str().unwrap().into(),
                r["conclusion"].as_str().unwrap().into(),
            )
        })
        .collect();
    let pairs: Vec<(&str, &str)> = order
        .iter()
        .map(|(a, b)| (a.as_str(), b.as_str()))
        .collect();
    assert_eq!(pairs, [("a", "b"), ("b", "a"), ("a", "c"), ("c", "a")]);

    let o = rulecat(&[
        "rank",
        "--input",
        &b,
        "--minsupp",
        "0.3",
        "--measures",
        "PDI",
    ]);
    assert_eq!(code(&o), 1);
    let o = rulecat(&[
        "rank",
        "--input",
        &b,
        "--minsupp",
        "0.3",
        "--measures",
        "PDI",
        "--context",
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn verify_flags_unexplained_cells() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_matrix(dir.path());
    let reference = dir.path().join("ref.csv");
    fs::write(
        &reference,
        "measure,property,value,source\nConfidence,P1,0,test\nLift,P1,0,test\n",
    )
    .unwrap();
    let o = rulecat(&[
        "properties",
        "verify",
        "--matrix",
        &m,
        "--reference",
        reference.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["checked"], 2);
    assert_eq!(v["unexplained"].as_array().unwrap().len(), 1);

    let waivers = dir.path().join("w.csv");
    fs::write(
        &waivers,
        "measure,property,justification\nConfidence,P1,deliberate\n",
    )
    .unwrap();
    let o = rulecat(&[
        "properties",
        "verify",
        "--matrix",
        &m,
        "--reference",
        reference.to_str().unwrap(),
        "--waivers",
        waivers.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
}
