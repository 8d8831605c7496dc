//! Macro-averaged F1, bootstrap standard error, and the feature-source
//! ablation sweep.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{SvmParams, TrainedClassifier};
use crate::data::Triple;
use crate::error::{Error, Result};
use crate::features::{build_matrix, ResourceBundle, FEATURE_NAMES};
use crate::matrix::Matrix;

pub const DEFAULT_BOOTSTRAP_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F1Scores {
    pub f1_positive: f64,
    pub f1_negative: f64,
    pub f1_macro: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(flatten)]
    pub scores: F1Scores,
    /// Bootstrap standard error of `f1_macro`.
    pub sem: f64,
}

fn class_f1(predictions: &[bool], gold: &[bool], class: bool) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&p, &g) in predictions.iter().zip(gold) {
        match (p == class, g == class) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        // class absent from both gold and predictions
        1.0
    } else {
        (2 * tp) as f64 / denom as f64
    }
}

fn check_lengths(predictions: &[bool], gold: &[bool], min: usize) -> Result<()> {
    if predictions.len() != gold.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: gold.len(),
        });
    }
    if gold.len() < min {
        return Err(Error::TooFew("evaluation", min));
    }
    Ok(())
}

pub fn macro_f1(predictions: &[bool], gold: &[bool]) -> Result<F1Scores> {
    check_lengths(predictions, gold, 1)?;
    Ok(f1_unchecked(predictions, gold))
}

fn f1_unchecked(predictions: &[bool], gold: &[bool]) -> F1Scores {
    let f1_positive = class_f1(predictions, gold, true);
    let f1_negative = class_f1(predictions, gold, false);
    F1Scores {
        f1_positive,
        f1_negative,
        f1_macro: (f1_positive + f1_negative) / 2.0,
        n: gold.len(),
    }
}

/// Sample standard deviation of macro F1 over `samples` resamples (with
/// replacement, same size as the input) drawn from `seed`.
pub fn bootstrap_sem(
    predictions: &[bool],
    gold: &[bool],
    samples: usize,
    seed: u64,
) -> Result<f64> {
    check_lengths(predictions, gold, 2)?;
    if samples < 2 {
        return Err(Error::InvalidArgument(
            "bootstrap needs at least 2 samples".into(),
        ));
    }
    let n = gold.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = vec![false; n];
    let mut g = vec![false; n];
    let scores: Vec<f64> = (0..samples)
        .map(|_| {
            for k in 0..n {
                let i = rng.gen_range(0..n);
                p[k] = predictions[i];
                g[k] = gold[i];
            }
            f1_unchecked(&p, &g).f1_macro
        })
        .collect();
    let mean = scores.iter().sum::<f64>() / samples as f64;
    let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (samples - 1) as f64;
    Ok(var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSettings {
    pub samples: usize,
    pub seed: u64,
}

pub fn evaluate(
    predictions: &[bool],
    gold: &[bool],
    bootstrap: &BootstrapSettings,
) -> Result<EvalReport> {
    let scores = macro_f1(predictions, gold)?;
    let sem = bootstrap_sem(predictions, gold, bootstrap.samples, bootstrap.seed)?;
    Ok(EvalReport { scores, sem })
}

/// Feature sources, in subset-label order, with their matrix columns.
pub const SOURCES: [(char, &[usize]); 5] = [
    ('A', &[0]),
    ('B', &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11]),
    ('C', &[12]),
    ('D', &[13]),
    ('E', &[14]),
];

/// Source letters for a bitmask (bit 0 = A).
pub fn subset_label(mask: u8) -> String {
    SOURCES
        .iter()
        .enumerate()
        .filter(|(bit, _)| mask & (1 << bit) != 0)
        .map(|(_, (c, _))| *c)
        .collect()
}

pub fn subset_columns(mask: u8) -> Vec<usize> {
    SOURCES
        .iter()
        .enumerate()
        .filter(|(bit, _)| mask & (1 << bit) != 0)
        .flat_map(|(_, (_, cols))| cols.iter().copied())
        .collect()
}

/// Labeled feature matrix for one split.
#[derive(Debug, Clone)]
pub struct LabeledMatrix {
    pub x: Matrix,
    pub labels: Vec<bool>,
}

impl LabeledMatrix {
    pub fn build(triples: &[Triple], bundle: &ResourceBundle) -> Result<Self> {
        let m = build_matrix(triples, bundle, true)?;
        Ok(Self {
            x: m.x,
            labels: m.labels.expect("labels required"),
        })
    }
}

/// Trains on `train` and reports on each of `splits`.
pub fn fit_and_evaluate(
    train: &LabeledMatrix,
    names: &[&str],
    splits: &[&LabeledMatrix],
    params: &SvmParams,
    bootstrap: &BootstrapSettings,
) -> Result<(TrainedClassifier, Vec<EvalReport>)> {
    let (clf, _) = TrainedClassifier::fit(&train.x, &train.labels, names, params)?;
    let reports = splits
        .iter()
        .map(|s| evaluate(&clf.predict_matrix(&s.x)?, &s.labels, bootstrap))
        .collect::<Result<Vec<_>>>()?;
    Ok((clf, reports))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub mask: u8,
    pub subset: String,
    pub validation: Option<EvalReport>,
    pub test: Option<EvalReport>,
    pub error: Option<String>,
}

pub fn ablate_matrices(
    train: &LabeledMatrix,
    validation: &LabeledMatrix,
    test: &LabeledMatrix,
    params: &SvmParams,
    bootstrap: &BootstrapSettings,
) -> Vec<AblationRow> {
    (1u8..32)
        .into_par_iter()
        .map(|mask| {
            let cols = subset_columns(mask);
            let names: Vec<&str> = cols.iter().map(|&j| FEATURE_NAMES[j]).collect();
            let restrict = |m: &LabeledMatrix| LabeledMatrix {
                x: m.x.select_columns(&cols),
                labels: m.labels.clone(),
            };
            let result = fit_and_evaluate(
                &restrict(train),
                &names,
                &[&restrict(validation), &restrict(test)],
                params,
                bootstrap,
            );
            let subset = subset_label(mask);
            match result {
                Ok((_, reports)) => AblationRow {
                    mask,
                    subset,
                    validation: Some(reports[0]),
                    test: Some(reports[1]),
                    error: None,
                },
                Err(e) => AblationRow {
                    mask,
                    subset,
                    validation: None,
                    test: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// All 31 non-empty source subsets, ordered by bitmask.
pub fn ablate(
    train: &[Triple],
    validation: &[Triple],
    test: &[Triple],
    bundle: &ResourceBundle,
    params: &SvmParams,
    bootstrap: &BootstrapSettings,
) -> Result<Vec<AblationRow>> {
    for (name, split) in [("train", train), ("validation", validation), ("test", test)] {
        if split.is_empty() {
            return Err(Error::InvalidArgument(format!("{name} split is empty")));
        }
    }
    let train = LabeledMatrix::build(train, bundle)?;
    let validation = LabeledMatrix::build(validation, bundle)?;
    let test = LabeledMatrix::build(test, bundle)?;
    Ok(ablate_matrices(
        &train,
        &validation,
        &test,
        params,
        bootstrap,
    ))
}

pub fn ablation_csv(rows: &[AblationRow]) -> String {
    let mut out = String::from("subset,validation_f1,validation_sem,test_f1,test_sem\n");
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.subset,
            cell(r.validation.map(|e| e.scores.f1_macro)),
            cell(r.validation.map(|e| e.sem)),
            cell(r.test.map(|e| e.scores.f1_macro)),
            cell(r.test.map(|e| e.sem)),
        ));
    }
    out
}

#[derive(Serialize)]
struct Point<'a> {
    label: &'a str,
    x: f64,
    y: f64,
    x_err: f64,
    y_err: f64,
}

/// Validation (x) versus test (y) macro F1 with SEM half-axes, one point per
/// successful subset.
pub fn ablation_points_json(rows: &[AblationRow]) -> String {
    let points: Vec<Point> = rows
        .iter()
        .filter_map(|r| {
            let (v, t) = (r.validation?, r.test?);
            Some(Point {
                label: &r.subset,
                x: v.scores.f1_macro,
                y: t.scores.f1_macro,
                x_err: v.sem,
                y_err: t.sem,
            })
        })
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({
        "x_label": "validation macro F1",
        "y_label": "test macro F1",
        "error": "bootstrap standard error",
        "points": points,
    }))
    .expect("points serialize")
}
