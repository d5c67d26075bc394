use std::fs;
use std::path::Path;

use barrier_core::pipeline::{Overrides, Run, RunConfig, Stage};
use barrier_core::synth::FixtureKind;
use barrier_core::Error;

fn run_in(dir: &Path, overrides: Overrides) -> Run {
    let config = FixtureKind::Small.write(5, dir).unwrap();
    let mut cfg = RunConfig::load(&config).unwrap();
    cfg.apply(&overrides);
    Run::new(cfg).unwrap()
}

#[test]
fn rerunning_a_stage_reproduces_its_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_in(dir.path(), Overrides::default());
    run.pipeline().unwrap();
    let before = fs::read(run.out().join("reports/reports.tsv")).unwrap();
    run.run_stage(Stage::Evaluate, None).unwrap();
    assert_eq!(fs::read(run.out().join("reports/reports.tsv")).unwrap(), before);
    run.run_stage(Stage::Train, None).unwrap();
    run.run_stage(Stage::Evaluate, None).unwrap();
    assert_eq!(fs::read(run.out().join("reports/reports.tsv")).unwrap(), before);
}

#[test]
fn models_from_another_config_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_in(dir.path(), Overrides::default());
    run.pipeline().unwrap();
    let features = run.out().join("features");
    let models = run.out().join("models");

    let other = run_in(
        dir.path(),
        Overrides {
            seed: Some(99),
            output: Some(dir.path().join("other")),
            ..Overrides::default()
        },
    );
    other.run_stage(Stage::Ingest, None).unwrap();
    // splice the first run's artifacts under the second run's stamps
    for (from, to) in [(features, "features"), (models, "models")] {
        let status = std::process::Command::new("cp")
            .args(["-r", from.to_str().unwrap(), other.out().join(to).to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let err = other.run_stage(Stage::Evaluate, None).unwrap_err();
    assert!(matches!(err, Error::ConfigMismatch { .. }), "{err}");
}

#[test]
fn missing_prior_stage_names_the_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_in(dir.path(), Overrides::default());
    let err = run.run_stage(Stage::Sentiment, None).unwrap_err();
    assert!(err.to_string().contains("ingest"), "{err}");
}
