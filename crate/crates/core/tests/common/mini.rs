//! Paths to the bundled data and the fixture-backed mini resource bundle.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use discatt::data::load_triples;
use discatt::evaluation::LabeledMatrix;
use discatt::features::{BundlePaths, ResourceBundle};
use discatt::Triple;

/// Workspace root; every crate lives at `crates/<name>`.
pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixtures() -> PathBuf {
    root().join("crates/core/tests/fixtures")
}

pub fn mini_dir() -> PathBuf {
    root().join("data/mini")
}

pub fn bundle(dir: &Path, model: PathBuf) -> ResourceBundle {
    ResourceBundle::load(&BundlePaths {
        embeddings: dir.join("embeddings.txt"),
        leads: dir.join("leads.tsv"),
        lexicon: dir.join("lexicon.jsonl"),
        unigrams: dir.join("unigrams.tsv"),
        bigrams: dir.join("bigrams.tsv"),
        sme_model: model,
    })
    .unwrap()
}

/// Mini resources with the relation model frozen in the fixtures.
pub fn mini_bundle() -> &'static ResourceBundle {
    static BUNDLE: OnceLock<ResourceBundle> = OnceLock::new();
    BUNDLE.get_or_init(|| bundle(&mini_dir(), fixtures().join("mini_sme_model.bin")))
}

pub fn mini_triples(split: &str) -> Vec<Triple> {
    load_triples(mini_dir().join(format!("{split}.csv"))).unwrap()
}

pub fn mini_matrix(split: &str) -> LabeledMatrix {
    LabeledMatrix::build(&mini_triples(split), mini_bundle()).unwrap()
}

/// Words drawn for random triples: mini vocabulary, inflected spellings and
/// an out-of-vocabulary word.
pub const TERMS: [&str; 18] = [
    "frog",
    "Frogs",
    "snail",
    "dog",
    "legs",
    "green",
    "shell",
    "tulip",
    "bird",
    "feathers",
    "car",
    "wheels",
    "apple",
    "tree",
    "unknownword",
    "Garden",
    "chair",
    "bark",
];

/// `(tp, fp, fn, tn)` with per-class F1 worked out by hand.
pub const CONFUSIONS: [((usize, usize, usize, usize), f64, f64); 10] = [
    ((1, 0, 1, 2), 2.0 / 3.0, 4.0 / 5.0),
    ((5, 0, 0, 5), 1.0, 1.0),
    ((0, 5, 5, 0), 0.0, 0.0),
    ((3, 1, 0, 4), 6.0 / 7.0, 8.0 / 9.0),
    ((2, 2, 2, 2), 1.0 / 2.0, 1.0 / 2.0),
    // no negatives anywhere: the empty negative class counts as perfect
    ((4, 0, 0, 0), 1.0, 1.0),
    ((0, 0, 0, 6), 1.0, 1.0),
    ((1, 3, 0, 0), 2.0 / 5.0, 0.0),
    ((7, 2, 3, 8), 14.0 / 19.0, 16.0 / 21.0),
    ((10, 1, 4, 5), 20.0 / 25.0, 10.0 / 15.0),
];

pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> (Vec<bool>, Vec<bool>) {
    let mut pred = Vec::new();
    let mut gold = Vec::new();
    for (n, p, g) in [
        (tp, true, true),
        (fp, true, false),
        (fn_, false, true),
        (tn, false, false),
    ] {
        pred.extend(std::iter::repeat_n(p, n));
        gold.extend(std::iter::repeat_n(g, n));
    }
    (pred, gold)
}

/// Rows of a golden CSV: header, then numeric cells.
pub fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}
