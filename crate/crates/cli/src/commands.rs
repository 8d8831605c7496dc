use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use discatt::data::{load_triples, Triple};
use discatt::evaluation::{
    ablate, ablation_csv, ablation_points_json, evaluate, fit_and_evaluate, EvalReport,
    LabeledMatrix,
};
use discatt::features::{build_matrix, ResourceBundle, FEATURE_NAMES};
use discatt::sme::{self, train_sme_logged, KnowledgeGraph, RelationSchema};
use discatt::{EmbeddingStore, TrainedClassifier};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))
            .map_err(CliError::Data)?;
    }
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::Data)
}

fn stamp(cfg: &RunConfig, hash: &str) -> String {
    format!("seed={} config_hash={hash}", cfg.seed)
}

#[derive(Serialize)]
struct ReportFile<'a> {
    split: &'a str,
    #[serde(flatten)]
    report: EvalReport,
    sem_method: &'static str,
    bootstrap_samples: usize,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    seed: u64,
    config_hash: &'a str,
}

impl<'a> ReportFile<'a> {
    fn new(cfg: &RunConfig, split: &'a str, report: EvalReport, hash: &'a str) -> Self {
        Self {
            split,
            report,
            sem_method: "bootstrap",
            bootstrap_samples: cfg.bootstrap_samples,
            c: None,
            tolerance: None,
            seed: cfg.seed,
            config_hash: hash,
        }
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Trains the relation model and writes it with a loss log.
pub fn train_sme(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let hash = cfg.hash()?;
    let kg = KnowledgeGraph::load(&cfg.resources.kg_edges)?;
    let schema = match &cfg.resources.schema {
        Some(p) => RelationSchema::load(p)?,
        None => RelationSchema::default_with(kg.relation_names()),
    };
    let hp = cfg.sme_hyperparams();
    let init = if hp.init_from_embeddings {
        Some(EmbeddingStore::load(&cfg.resources.embeddings)?)
    } else {
        None
    };
    log::info!(
        "training relation model: {} nodes, {} edges, {} iterations",
        kg.node_count(),
        kg.edge_count(),
        hp.iterations
    );
    let trained = train_sme_logged(&kg, &schema, &hp, init.as_ref())?;

    let model_path = cfg.sme_model_path();
    write(&model_path, sme::artifact::to_bytes(&trained.model))?;
    let mut log_text = format!("# {}\nstep\tmean_loss\n", stamp(cfg, &hash));
    for p in &trained.loss_log {
        log_text.push_str(&format!("{}\t{}\n", p.step, p.mean_loss));
    }
    write(&cfg.out_dir.join("sme_train_log.tsv"), log_text)?;
    Ok(model_path)
}

/// Loads the resource bundle, training the relation model first if its
/// artifact is not in the output directory yet.
pub fn load_bundle(cfg: &RunConfig) -> Result<ResourceBundle, CliError> {
    if !cfg.sme_model_path().is_file() {
        log::info!(
            "{} missing, running train-sme",
            cfg.sme_model_path().display()
        );
        train_sme(cfg)?;
    }
    Ok(ResourceBundle::load(&cfg.bundle_paths())?)
}

pub fn extract_features(cfg: &RunConfig, split: &str) -> Result<PathBuf, CliError> {
    let (name, path) = cfg.split(split);
    let triples = load_triples(&path)?;
    let bundle = load_bundle(cfg)?;
    let m = build_matrix(&triples, &bundle, false)?;
    let out = cfg.out_dir.join(format!("features_{name}.csv"));
    write(&out, m.to_csv())?;
    Ok(out)
}

pub struct TrainOutput {
    pub classifier: PathBuf,
    pub report: PathBuf,
}

/// Fits scales and the SVM on the training split, clips, and reports on
/// the training split.
pub fn train(cfg: &RunConfig) -> Result<TrainOutput, CliError> {
    let hash = cfg.hash()?;
    let bundle = load_bundle(cfg)?;
    let triples = load_triples(&cfg.splits.train)?;
    let train = LabeledMatrix::build(&triples, &bundle)?;
    let (clf, reports) = fit_and_evaluate(
        &train,
        &FEATURE_NAMES,
        &[&train],
        &cfg.classifier,
        &cfg.bootstrap(),
    )?;

    let mut artifact = serde_json::to_value(&clf).expect("classifier serializes");
    artifact["seed"] = cfg.seed.into();
    artifact["config_hash"] = hash.clone().into();
    let classifier = cfg.classifier_path();
    write(
        &classifier,
        serde_json::to_string_pretty(&artifact).expect("json") + "\n",
    )?;

    let mut report = ReportFile::new(cfg, "train", reports[0], &hash);
    report.c = Some(clf.params.c);
    report.tolerance = Some(clf.params.tolerance);
    let report_path = cfg.out_dir.join("report_train.json");
    write(&report_path, report.to_json())?;
    Ok(TrainOutput {
        classifier,
        report: report_path,
    })
}

fn count_prediction_rows(text: &str) -> usize {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .count()
        .saturating_sub(1)
}

/// Writes `predictions_<split>.csv` and checks its row count against the
/// input before returning.
pub fn predict(cfg: &RunConfig, split: &str) -> Result<PathBuf, CliError> {
    let hash = cfg.hash()?;
    let clf_path = cfg.classifier_path();
    if !clf_path.is_file() {
        return Err(CliError::data(format!(
            "classifier artifact {} is missing; run `train` first",
            clf_path.display()
        )));
    }
    let clf = TrainedClassifier::load(&clf_path)?;
    let (name, path) = cfg.split(split);
    let triples = load_triples(&path)?;
    if triples.is_empty() {
        log::warn!("{} has no rows", path.display());
    }
    let bundle = load_bundle(cfg)?;
    let m = build_matrix(&triples, &bundle, false)?;
    let predicted = clf.predict_matrix(&m.x)?;

    let mut out = format!(
        "# input={} rows={} {}\nterm1,term2,attribute,predicted\n",
        path.display(),
        triples.len(),
        stamp(cfg, &hash)
    );
    for (t, p) in triples.iter().zip(&predicted) {
        out.push_str(&format!(
            "{},{},{},{}\n",
            t.term1,
            t.term2,
            t.attribute,
            u8::from(*p)
        ));
    }
    let out_path = cfg.out_dir.join(format!("predictions_{name}.csv"));
    write(&out_path, &out)?;

    let written = fs::read_to_string(&out_path)
        .with_context(|| format!("re-reading {}", out_path.display()))
        .map_err(CliError::Data)?;
    let rows = count_prediction_rows(&written);
    if rows != triples.len() {
        return Err(CliError::data(format!(
            "{} has {rows} rows but {} has {}",
            out_path.display(),
            path.display(),
            triples.len()
        )));
    }
    Ok(out_path)
}

/// Parses a predictions file written by [`predict`].
pub fn read_predictions(path: &Path) -> Result<Vec<(Triple, bool)>, CliError> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Data)?;
    let mut out = Vec::new();
    let mut header_seen = false;
    for (idx, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !header_seen && line.trim() == "term1,term2,attribute,predicted" {
            header_seen = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || {
            CliError::data(format!(
                "{}:{}: malformed prediction row",
                path.display(),
                idx + 1
            ))
        };
        if f.len() != 4 {
            return Err(bad());
        }
        let p = match f[3] {
            "1" => true,
            "0" => false,
            _ => return Err(bad()),
        };
        out.push((Triple::new(f[0], f[1], f[2]), p));
    }
    Ok(out)
}

pub fn evaluate_predictions(
    cfg: &RunConfig,
    predictions: &Path,
    gold: &str,
) -> Result<PathBuf, CliError> {
    let hash = cfg.hash()?;
    let (name, gold_path) = cfg.split(gold);
    let preds = read_predictions(predictions)?;
    let gold = load_triples(&gold_path)?;
    let gold_labels = discatt::data::labels(&gold)?;
    for (i, ((p, _), g)) in preds.iter().zip(&gold).enumerate() {
        if p.key() != g.key() {
            return Err(CliError::data(format!(
                "row {}: prediction key {:?} does not match gold key {:?}",
                i + 1,
                p.key(),
                g.key()
            )));
        }
    }
    if preds.len() != gold.len() {
        return Err(CliError::Data(anyhow!(
            "{} has {} rows but {} has {}; first unmatched row is {}",
            predictions.display(),
            preds.len(),
            gold_path.display(),
            gold.len(),
            preds.len().min(gold.len()) + 1
        )));
    }
    let predicted: Vec<bool> = preds.iter().map(|(_, p)| *p).collect();
    let report = evaluate(&predicted, &gold_labels, &cfg.bootstrap())?;
    let out = cfg.out_dir.join(format!("report_{name}.json"));
    write(&out, ReportFile::new(cfg, &name, report, &hash).to_json())?;
    Ok(out)
}

pub struct AblateOutput {
    pub csv: PathBuf,
    pub points: PathBuf,
}

pub fn run_ablation(cfg: &RunConfig) -> Result<AblateOutput, CliError> {
    let hash = cfg.hash()?;
    let bundle = load_bundle(cfg)?;
    let train = load_triples(&cfg.splits.train)?;
    let validation = load_triples(&cfg.splits.validation)?;
    let test = load_triples(&cfg.splits.test)?;
    let rows = ablate(
        &train,
        &validation,
        &test,
        &bundle,
        &cfg.classifier,
        &cfg.bootstrap(),
    )?;
    for r in rows.iter().filter(|r| r.error.is_some()) {
        log::warn!(
            "subset {} failed: {}",
            r.subset,
            r.error.as_deref().unwrap_or("")
        );
    }
    let csv = cfg.out_dir.join("ablation.csv");
    write(
        &csv,
        format!("# {}\n{}", stamp(cfg, &hash), ablation_csv(&rows)),
    )?;

    let mut points: serde_json::Value =
        serde_json::from_str(&ablation_points_json(&rows)).expect("points json");
    points["seed"] = cfg.seed.into();
    points["config_hash"] = hash.into();
    let points_path = cfg.out_dir.join("ablation_points.json");
    write(
        &points_path,
        serde_json::to_string_pretty(&points).expect("json") + "\n",
    )?;
    Ok(AblateOutput {
        csv,
        points: points_path,
    })
}
