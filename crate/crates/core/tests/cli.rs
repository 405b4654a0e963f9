use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use news_diversity::harness::report::{round4, ReportFile};
use news_diversity::metrics::aggregate;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn newsdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_newsdiv"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn fixture_args(out: &Path) -> Vec<String> {
    [
        ("--news", fixture("news.tsv")),
        ("--bodies", fixture("bodies.jsonl")),
        ("--behaviors", fixture("behaviors.tsv")),
        ("--lexicon", fixture("lexicon.tsv")),
        ("--gazetteer", fixture("gazetteer.jsonl")),
        ("--output", out.display().to_string()),
    ]
    .into_iter()
    .flat_map(|(flag, value)| [flag.to_owned(), value])
    .collect()
}

fn run(subcommand: &str, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![subcommand.to_owned()];
    args.extend(fixture_args(out));
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    newsdiv(&refs)
}

fn assert_success(output: &Output) {
    assert!(
        output.status.success(),
        "status {:?}: {}",
        output.status,
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn evaluate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_success(&run("evaluate", &a, &["--seed", "11"]));
    assert_success(&run("evaluate", &b, &["--seed", "11"]));
    for file in ["report.json", "samples.csv", "skips.json"] {
        assert_eq!(
            fs::read(a.join(file)).unwrap(),
            fs::read(b.join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn report_has_six_bounded_rows_per_recommender() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&run("evaluate", dir.path(), &[]));
    let report: ReportFile =
        serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report.rows.len(), 12);
    for row in &report.rows {
        assert_eq!(row.cutoff_label, "@N");
        if let Some(mean) = row.mean {
            assert!((0.0..=1.0).contains(&mean), "{row:?}");
        }
    }
}

#[test]
fn samples_reproduce_report_aggregates() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&run("evaluate", dir.path(), &["--cutoffs", "1,5,0"]));
    let report: ReportFile =
        serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    let mut reader = csv::Reader::from_path(dir.path().join("samples.csv")).unwrap();
    let mut groups: BTreeMap<(String, String, String, String, String), Vec<f64>> = BTreeMap::new();
    for record in reader.records() {
        let r = record.unwrap();
        let key = (
            r[0].into(),
            r[1].into(),
            r[2].into(),
            r[3].into(),
            r[4].into(),
        );
        groups.entry(key).or_default().push(r[6].parse().unwrap());
    }
    let total: usize = groups.values().map(Vec::len).sum();
    assert_eq!(total, report.rows.iter().map(|r| r.n).sum::<usize>());
    for row in &report.rows {
        let key = (
            row.metric.to_string(),
            row.recommender.clone(),
            row.divergence.to_string(),
            row.weighting.to_string(),
            row.cutoff.to_string(),
        );
        let values = groups.get(&key).cloned().unwrap_or_default();
        assert_eq!(values.len(), row.n);
        let agg = aggregate(&values);
        assert_eq!(agg.map(|a| round4(a.mean)), row.mean, "{row:?}");
        assert_eq!(agg.map(|a| round4(a.std)), row.std, "{row:?}");
        assert_eq!(agg.map(|a| round4(a.ci95)), row.ci95, "{row:?}");
    }
}

#[test]
fn sensitivity_table_has_a_column_per_cutoff() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&run(
        "sensitivity",
        dir.path(),
        &["--cutoffs", "1,2,5,10,20,0"],
    ));
    let text = fs::read_to_string(dir.path().join("sensitivity.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "recommender,metric,divergence,weighting,@1,@2,@5,@10,@20,@N"
    );
    // 2 recommenders x 6 metrics x 2 divergences x 2 weightings
    assert_eq!(lines.count(), 48);
}

#[test]
fn enrich_is_idempotent_and_entities_need_a_gazetteer() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_success(&run("enrich", &a, &[]));
    assert_success(&run("enrich", &b, &[]));
    let first = fs::read(a.join("enriched.jsonl")).unwrap();
    assert_eq!(first, fs::read(b.join("enriched.jsonl")).unwrap());

    let bare = dir.path().join("bare");
    let out = bare.display().to_string();
    let news = fixture("news.tsv");
    let bodies = fixture("bodies.jsonl");
    let lexicon = fixture("lexicon.tsv");
    assert_success(&newsdiv(&[
        "enrich",
        "--news",
        &news,
        "--bodies",
        &bodies,
        "--lexicon",
        &lexicon,
        "--output",
        &out,
    ]));
    let text = fs::read_to_string(bare.join("enriched.jsonl")).unwrap();
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["political_actors"], serde_json::json!([]));
        assert_eq!(v["minority_mentions"], 0);
        assert!(v["complexity"].is_number());
    }
}

#[test]
fn enriched_catalog_and_sidecar_feed_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&run("enrich", dir.path(), &[]));
    let enriched = dir.path().join("enriched.jsonl").display().to_string();
    let out = dir.path().join("eval").display().to_string();
    let behaviors = fixture("behaviors.tsv");
    let sidecar = fixture("sidecar.jsonl");
    assert_success(&newsdiv(&[
        "evaluate",
        "--enriched",
        &enriched,
        "--behaviors",
        &behaviors,
        "--sidecar",
        &sidecar,
        "--output",
        &out,
    ]));
    let skips: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("eval/skips.json")).unwrap()).unwrap();
    let warnings = skips["warnings"].as_array().unwrap();
    assert_eq!(warnings.len(), 2, "{warnings:?}");
}

#[test]
fn external_rankings_match_the_builtin_baseline() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&run("recommend", dir.path(), &["--strategy", "popular"]));
    let recs = dir.path().join("recommendations_popular.jsonl");
    assert_eq!(fs::read_to_string(&recs).unwrap().lines().count(), 3);
    let recs = recs.display().to_string();
    assert_success(&run("evaluate", dir.path(), &["--recommendations", &recs]));
    let report: ReportFile =
        serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    let by = |name: &str| -> Vec<Option<f64>> {
        report
            .rows
            .iter()
            .filter(|r| r.recommender == name)
            .map(|r| r.mean)
            .collect()
    };
    assert_eq!(by("popular"), by("external:recommendations_popular"));
}

#[test]
fn config_file_supplies_settings() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        format!(
            "news = {:?}\nbehaviors = {:?}\nrecommenders = [\"random\"]\ndivergence = \"kl\"\nweighting = \"ndcg\"\ncutoffs = [10]\noutput = {:?}\n",
            fixture("news.tsv"),
            fixture("behaviors.tsv"),
            dir.path().join("out").display().to_string()
        ),
    )
    .unwrap();
    let config = config.display().to_string();
    assert_success(&newsdiv(&[
        "evaluate", "--config", &config, "--alpha", "0.01",
    ]));
    let report: ReportFile =
        serde_json::from_slice(&fs::read(dir.path().join("out/report.json")).unwrap()).unwrap();
    assert_eq!(report.settings.alpha, 0.01);
    assert!(report.rows.iter().all(|r| r.recommender == "random"
        && r.divergence.as_str() == "kl"
        && r.weighting.as_str() == "ndcg"
        && r.cutoff_label == "@10"));
}

#[test]
fn input_problems_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let cases: Vec<Vec<&str>> = vec![
        vec!["evaluate", "--news", "/no/such/news.tsv", "--output", &out],
        vec!["evaluate", "--divergence", "hellinger"],
        vec!["evaluate", "--alpha", "0.9", "--output", &out],
        vec!["frobnicate"],
    ];
    for args in cases {
        let output = newsdiv(&args);
        assert_eq!(output.status.code(), Some(1), "{args:?}");
    }
    let behaviors = fixture("behaviors.tsv");
    let output = newsdiv(&["evaluate", "--behaviors", &behaviors, "--output", &out]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let output = run("evaluate", &blocker.join("sub"), &[]);
    assert_eq!(output.status.code(), Some(2));
}
