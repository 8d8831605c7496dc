use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Copies the mini dataset into a scratch directory so tests can edit it.
fn scratch() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(workspace().join("data/mini")).unwrap() {
        let entry = entry.unwrap();
        if entry.file_type().unwrap().is_file() {
            fs::copy(entry.path(), dir.path().join(entry.file_name())).unwrap();
        }
    }
    dir
}

fn run(data: &Path, out: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_discatt"))
        .arg("--config")
        .arg(data.join("config.json"))
        .arg("--out")
        .arg(data.join(out))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn ok(data: &Path, out: &str, args: &[&str]) -> Output {
    let o = run(data, out, args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn data_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(String::from)
        .collect()
}

fn full_pipeline(data: &Path, out: &str) {
    ok(data, out, &["train"]);
    ok(data, out, &["predict", "validation"]);
    ok(data, out, &["predict", "test"]);
    let preds = data.join(out).join("predictions_validation.csv");
    ok(
        data,
        out,
        &["evaluate", preds.to_str().unwrap(), "validation"],
    );
    ok(data, out, &["extract-features", "train"]);
    ok(data, out, &["ablate"]);
}

fn sorted_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    v.sort();
    v
}

#[test]
fn pipeline_is_byte_identical_across_reruns() {
    let data = scratch();
    full_pipeline(data.path(), "a");
    full_pipeline(data.path(), "b");
    let a = sorted_files(&data.path().join("a"));
    let b = sorted_files(&data.path().join("b"));
    let names = |v: &[PathBuf]| {
        v.iter()
            .map(|p| p.file_name().unwrap().to_owned())
            .collect::<Vec<_>>()
    };
    assert_eq!(names(&a), names(&b));
    assert_eq!(a.len(), 10, "{:?}", names(&a));
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(
            fs::read(x).unwrap(),
            fs::read(y).unwrap(),
            "{}",
            x.display()
        );
    }
}

#[test]
fn train_report_matches_golden() {
    let data = scratch();
    ok(data.path(), "out", &["train"]);
    let got = fs::read_to_string(data.path().join("out/report_train.json")).unwrap();
    let golden =
        fs::read_to_string(workspace().join("crates/cli/tests/fixtures/report_train_seed42.json"))
            .unwrap();
    assert_eq!(got, golden);

    let report = json(&data.path().join("out/report_train.json"));
    assert!(report["f1_macro"].as_f64().unwrap() >= 0.95);
    assert_eq!(report["C"], 1.0);
    assert_eq!(report["tolerance"], 1e-4);
    assert_eq!(report["n"], 20);
}

#[test]
fn relation_model_matches_fixture() {
    let data = scratch();
    ok(data.path(), "out", &["train-sme"]);
    let got = fs::read(data.path().join("out/sme_model.bin")).unwrap();
    let fixture =
        fs::read(workspace().join("crates/core/tests/fixtures/mini_sme_model.bin")).unwrap();
    assert!(
        got == fixture,
        "trained model differs from the frozen fixture"
    );

    let log = fs::read_to_string(data.path().join("out/sme_train_log.tsv")).unwrap();
    assert!(log.starts_with("# seed=42 config_hash="));
    assert_eq!(log.lines().count(), 2 + 30);
}

#[test]
fn classifier_artifact_round_trips() {
    let data = scratch();
    ok(data.path(), "out", &["train"]);
    let path = data.path().join("out/classifier.json");
    let clf = discatt::TrainedClassifier::load(&path).unwrap();
    assert_eq!(clf.feature_names, discatt::FEATURE_NAMES);
    assert!(clf.weights.iter().all(|w| *w >= 0.0));
    let reparsed = discatt::TrainedClassifier::from_json(&clf.to_json()).unwrap();
    assert_eq!(reparsed, clf);
    let v = json(&path);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn predictions_have_one_row_per_input_row() {
    let data = scratch();
    ok(data.path(), "out", &["train"]);
    let unlabeled = data.path().join("unlabeled.csv");
    fs::write(
        &unlabeled,
        "frog,dog,green\nsnail,car,shell\nApples,chair,tree\n",
    )
    .unwrap();
    ok(
        data.path(),
        "out",
        &["predict", unlabeled.to_str().unwrap()],
    );
    let preds = data.path().join("out/predictions_unlabeled.csv");
    let rows = data_rows(&preds);
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("frog,dog,green,"));
    let head = fs::read_to_string(&preds).unwrap();
    assert!(head.lines().next().unwrap().contains("rows=3"));

    // no gold labels in the file
    let o = run(
        data.path(),
        "out",
        &[
            "evaluate",
            preds.to_str().unwrap(),
            unlabeled.to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(2));

    ok(data.path(), "out", &["predict", "test"]);
    let inputs = fs::read_to_string(data.path().join("test.csv")).unwrap();
    assert_eq!(
        data_rows(&data.path().join("out/predictions_test.csv")).len(),
        inputs.lines().count()
    );
}

#[test]
fn evaluating_gold_as_predictions_is_perfect() {
    let data = scratch();
    let gold = fs::read_to_string(data.path().join("validation.csv")).unwrap();
    let preds = data.path().join("perfect.csv");
    fs::write(&preds, format!("term1,term2,attribute,predicted\n{gold}")).unwrap();
    ok(
        data.path(),
        "out",
        &["evaluate", preds.to_str().unwrap(), "validation"],
    );
    let r = json(&data.path().join("out/report_validation.json"));
    assert_eq!(r["f1_macro"], 1.0);
    assert_eq!(r["sem"], 0.0);
    assert_eq!(r["n"], 12);
}

#[test]
fn misaligned_predictions_are_rejected() {
    let data = scratch();
    ok(data.path(), "out", &["train"]);
    ok(data.path(), "out", &["predict", "validation"]);
    let preds = data.path().join("out/predictions_validation.csv");
    let o = run(
        data.path(),
        "out",
        &["evaluate", preds.to_str().unwrap(), "test"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 1"));

    // truncated output, the classic submission mistake
    let text = fs::read_to_string(&preds).unwrap();
    let cut: String = text.lines().take(6).map(|l| format!("{l}\n")).collect();
    fs::write(&preds, cut).unwrap();
    let o = run(
        data.path(),
        "out",
        &["evaluate", preds.to_str().unwrap(), "validation"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rows"));
}

#[test]
fn ablation_has_31_rows() {
    let data = scratch();
    ok(data.path(), "out", &["ablate"]);
    let rows = data_rows(&data.path().join("out/ablation.csv"));
    assert_eq!(rows.len(), 31);
    assert!(rows[0].starts_with("A,"));
    assert!(rows[30].starts_with("ABCDE,"));
    let points = json(&data.path().join("out/ablation_points.json"));
    assert_eq!(points["points"].as_array().unwrap().len(), 31);
}

#[test]
fn features_csv_shape() {
    let data = scratch();
    ok(data.path(), "out", &["extract-features", "train"]);
    let text = fs::read_to_string(data.path().join("out/features_train.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 16);
    assert_eq!(header[15], "label");
    assert_eq!(lines.count(), 20);
}

#[test]
fn missing_edge_file_is_reported() {
    let data = scratch();
    let o = run(
        data.path(),
        "out",
        &["--kg-edges", "/nonexistent/edges.tsv", "train-sme"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/edges.tsv"));

    fs::remove_file(data.path().join("edges.tsv")).unwrap();
    let o = run(data.path(), "out", &["train"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("edges.tsv"));
}

#[test]
fn malformed_inputs_map_to_exit_codes() {
    let data = scratch();
    fs::write(data.path().join("bad.json"), "{ not json").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_discatt"))
        .args([
            "--config",
            data.path().join("bad.json").to_str().unwrap(),
            "train",
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));

    let o = run(data.path(), "out", &["no-such-command"]);
    assert_eq!(o.status.code(), Some(1));

    fs::write(data.path().join("embeddings.txt"), "frog 1 2\ndog 1\n").unwrap();
    let o = run(data.path(), "out", &["train"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("embeddings.txt"));
}

#[test]
fn predict_without_classifier_fails() {
    let data = scratch();
    let o = run(data.path(), "out", &["predict", "test"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("classifier.json"));
}

fn config_hash(data: &Path, out: &str) -> String {
    ok(data, out, &["train"]);
    json(&data.join(out).join("report_train.json"))["config_hash"]
        .as_str()
        .unwrap()
        .to_string()
}

#[test]
fn config_hash_tracks_content_not_location() {
    let data = scratch();
    let base = config_hash(data.path(), "a");

    // same content elsewhere
    let moved = scratch();
    assert_eq!(config_hash(moved.path(), "a"), base);

    // every input file participates
    for file in ["lexicon.jsonl", "test.csv", "edges.tsv"] {
        let edited = scratch();
        let path = edited.path().join(file);
        let mut text = fs::read_to_string(&path).unwrap();
        text.push_str(match file {
            "lexicon.jsonl" => "{\"word\": \"zebra\", \"synonyms\": [\"horse\"]}\n",
            "test.csv" => "zebra,dog,stripes,1\n",
            _ => "IsA\tzebra\tanimal\n",
        });
        fs::write(&path, text).unwrap();
        assert_ne!(config_hash(edited.path(), "a"), base, "{file}");
    }

    let o = ok(data.path(), "s", &["--seed", "7", "train"]);
    assert!(o.status.success());
    let r = json(&data.path().join("s/report_train.json"));
    assert_eq!(r["seed"], 7);
    assert_ne!(r["config_hash"].as_str().unwrap(), base);
}

#[test]
fn path_flags_override_config() {
    let data = scratch();
    let alt = data.path().join("alt_train.csv");
    let text = fs::read_to_string(data.path().join("train.csv")).unwrap();
    let first16: String = text.lines().take(16).map(|l| format!("{l}\n")).collect();
    fs::write(&alt, first16).unwrap();
    ok(
        data.path(),
        "out",
        &["--train", alt.to_str().unwrap(), "train"],
    );
    assert_eq!(json(&data.path().join("out/report_train.json"))["n"], 16);
}
