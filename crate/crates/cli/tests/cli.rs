use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn barriers(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_barriers"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn repo_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn synth(kind: &str, dir: &Path) -> String {
    let out = barriers(&["synth", kind, dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    dir.join("config.toml").to_string_lossy().into_owned()
}

#[test]
fn shipped_fixtures_match_the_generator() {
    for kind in ["directional", "small"] {
        let dir = tempfile::tempdir().unwrap();
        synth(kind, dir.path());
        for file in ["articles.jsonl", "publishers.csv", "countries.csv", "inferences.tsv", "config.toml"] {
            let fresh = fs::read(dir.path().join(file)).unwrap();
            let shipped = fs::read(repo_fixture(kind).join(file)).unwrap();
            assert!(fresh == shipped, "fixtures/{kind}/{file} is stale");
        }
    }
}

#[test]
fn missing_country_file_fails_and_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = synth("small", dir.path());
    fs::remove_file(dir.path().join("countries.csv")).unwrap();
    let out = barriers(&["--config", &config, "annotate", "--barrier", "cultural"]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("countries.csv"), "{stderr}");
}

#[test]
fn rerun_gives_identical_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = synth("small", dir.path());
    let manifest = |out: &str| {
        let o = barriers(&["--config", &config, "--out", out, "pipeline"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(Path::new(out).join("manifest.tsv")).unwrap()
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(manifest(a.to_str().unwrap()), manifest(b.to_str().unwrap()));
}

#[test]
fn stages_run_separately_and_refuse_mixed_configs() {
    let dir = tempfile::tempdir().unwrap();
    let config = synth("directional", dir.path());
    for stage in ["ingest", "annotate", "sentiment", "inferences", "featurize", "train", "evaluate", "report"] {
        let o = barriers(&["--config", &config, stage]);
        assert!(o.status.success(), "{stage}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = barriers(&["--config", &config, "--seed", "43", "train"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("config_hash="));
    let manifest = fs::read_to_string(dir.path().join("out/manifest.tsv")).unwrap();
    assert!(manifest.contains("stage\ttrain\tfailed"), "{manifest}");
}

#[test]
fn external_echo_of_gold_scores_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = synth("directional", dir.path());
    let flags = ["--config", config.as_str(), "--mode", "plain"];
    let o = barriers(&[&flags[..], &["pipeline"]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let split = fs::read_to_string(dir.path().join("out/features/geographical/society/plain/split.tsv")).unwrap();
    let preds: String = split
        .lines()
        .skip(2)
        .map(|l| l.split('\t').collect::<Vec<_>>())
        .filter(|c| c[1] == "test")
        .map(|c| format!("{}\t{}\n", c[0], c[2]))
        .collect();
    let preds_path = dir.path().join("preds.txt");
    fs::write(&preds_path, preds).unwrap();

    let o = barriers(&[&flags[..], &["evaluate", "--external", preds_path.to_str().unwrap()]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(dir.path().join("out/reports/external.tsv")).unwrap();
    let row = report.lines().nth(2).unwrap();
    assert_eq!(row.split('\t').nth(4), Some("1.000000"), "{report}");
}

#[test]
fn unknown_barrier_is_a_usage_error() {
    let o = barriers(&["--barrier", "spiritual", "ingest"]);
    assert!(!o.status.success());
}
