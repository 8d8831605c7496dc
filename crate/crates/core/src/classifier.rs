//! Column-normalized, L2-regularized squared-hinge linear SVM with
//! post-training clipping of negative feature weights.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Default decision threshold of the similarity-difference heuristic.
pub const HEURISTIC_A_THRESHOLD: f64 = 0.0961;

/// Multiplicative per-column factors fit on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColumnScales(pub Vec<f64>);

impl ColumnScales {
    /// `1 / ||column||`, or 1 for an all-zero column.
    pub fn fit(x: &Matrix) -> Result<Self> {
        if x.rows() == 0 {
            return Err(Error::TooFew("fitting column scales", 1));
        }
        Ok(Self(
            (0..x.cols())
                .map(|j| {
                    let norm = x.column(j).map(|v| v * v).sum::<f64>().sqrt();
                    if norm > 0.0 {
                        1.0 / norm
                    } else {
                        1.0
                    }
                })
                .collect(),
        ))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.len() {
            return Err(Error::Shape {
                expected: self.len(),
                found: x.cols(),
            });
        }
        let mut out = x.clone();
        for i in 0..out.rows() {
            for (v, s) in out.row_mut(i).iter_mut().zip(&self.0) {
                *v *= s;
            }
        }
        Ok(out)
    }
}

pub fn fit_column_scales(x: &Matrix) -> Result<ColumnScales> {
    ColumnScales::fit(x)
}

/// Scaled features with ±1 targets, both classes present.
#[derive(Debug, Clone)]
pub struct SvmProblem {
    x: Matrix,
    y: Vec<f64>,
}

impl SvmProblem {
    pub fn new(x: Matrix, y: Vec<f64>) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.rows(),
                right: y.len(),
            });
        }
        if let Some(bad) = y.iter().find(|v| **v != 1.0 && **v != -1.0) {
            return Err(Error::InvalidArgument(format!("target {bad} is not ±1")));
        }
        let has_pos = y.iter().any(|v| *v > 0.0);
        let has_neg = y.iter().any(|v| *v < 0.0);
        if !(has_pos && has_neg) {
            return Err(Error::SingleClass);
        }
        Ok(Self { x, y })
    }

    pub fn from_labels(x: Matrix, labels: &[bool]) -> Result<Self> {
        Self::new(
            x,
            labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect(),
        )
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// `0.5 * ||(w, b)||^2 + C * Σ max(0, 1 - y (w·x + b))^2`.
    pub fn primal_objective(&self, weights: &[f64], intercept: f64, c: f64) -> f64 {
        let reg = weights.iter().map(|w| w * w).sum::<f64>() + intercept * intercept;
        let loss: f64 = self
            .x
            .iter_rows()
            .zip(&self.y)
            .map(|(row, y)| {
                let margin = y * (dot(weights, row) + intercept);
                let h = (1.0 - margin).max(0.0);
                h * h
            })
            .sum();
        0.5 * reg + c * loss
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    #[serde(rename = "C")]
    pub c: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tolerance: 1e-4,
            max_iterations: 1000,
        }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidArgument("C must be positive".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument(
                "max_iterations must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmSolution {
    pub weights: Vec<f64>,
    pub intercept: f64,
    /// Primal objective at the returned point.
    pub objective: f64,
    /// Passes over the data.
    pub iterations: usize,
    pub converged: bool,
    /// Spread of projected gradients at the last pass (the stopping measure).
    pub projected_gradient_gap: f64,
    /// `(primal - dual) / primal` at the last pass.
    pub relative_duality_gap: f64,
}

/// Dual coordinate descent for the L2-loss SVM with the intercept handled
/// as an extra constant-1 feature (so it is regularized too).
///
/// Stops once the spread of projected dual gradients over a pass drops
/// below `tolerance`. The returned point is the best primal iterate among
/// pass endpoints; the visiting order per pass comes from a fixed seed, so
/// the trajectory does not depend on the tolerance.
pub fn train_svc(problem: &SvmProblem, params: &SvmParams) -> Result<SvmSolution> {
    params.validate()?;
    let x = &problem.x;
    let y = &problem.y;
    let n = x.rows();
    let d = x.cols();
    let diag = 0.5 / params.c;

    let qd: Vec<f64> = x
        .iter_rows()
        .map(|row| diag + dot(row, row) + 1.0)
        .collect();
    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    let mut converged = false;
    let mut pg_gap = f64::INFINITY;
    let mut dual_gap = f64::INFINITY;
    let mut passes = 0;

    while passes < params.max_iterations {
        passes += 1;
        order.shuffle(&mut rng);
        let mut pg_max = f64::NEG_INFINITY;
        let mut pg_min = f64::INFINITY;
        for &i in &order {
            let row = x.row(i);
            let g = y[i] * (dot(&w, row) + b) - 1.0 + diag * alpha[i];
            let pg = if alpha[i] == 0.0 { g.min(0.0) } else { g };
            pg_max = pg_max.max(pg);
            pg_min = pg_min.min(pg);
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (alpha[i] - g / qd[i]).max(0.0);
                let step = (alpha[i] - old) * y[i];
                for (wj, xj) in w.iter_mut().zip(row) {
                    *wj += step * xj;
                }
                b += step;
            }
        }

        let primal = problem.primal_objective(&w, b, params.c);
        if !primal.is_finite() {
            return Err(Error::Numerical("non-finite SVM objective".into()));
        }
        let sq_norm = dot(&w, &w) + b * b;
        let dual = alpha.iter().sum::<f64>()
            - 0.5 * sq_norm
            - 0.5 * diag * alpha.iter().map(|a| a * a).sum::<f64>();
        dual_gap = (primal - dual) / primal.abs().max(f64::MIN_POSITIVE);
        pg_gap = pg_max - pg_min;
        if best.as_ref().is_none_or(|(obj, _, _)| primal < *obj) {
            best = Some((primal, w.clone(), b));
        }
        if pg_gap <= params.tolerance {
            converged = true;
            break;
        }
    }

    let (objective, weights, intercept) = match best {
        Some(b) => b,
        None => (problem.primal_objective(&w, b, params.c), w, b),
    };
    if !converged {
        log::warn!(
            "SVM solver hit {} passes without converging (projected gradient gap {pg_gap:.3e}, relative duality gap {dual_gap:.3e})",
            params.max_iterations
        );
    }
    Ok(SvmSolution {
        weights,
        intercept,
        objective,
        iterations: passes,
        converged,
        projected_gradient_gap: pg_gap,
        relative_duality_gap: dual_gap,
    })
}

/// Replaces negative weights with zero.
pub fn clip_negative(weights: &[f64]) -> Vec<f64> {
    weights
        .iter()
        .map(|w| if *w < 0.0 { 0.0 } else { *w })
        .collect()
}

/// `1` iff `simdiff > threshold`.
pub fn heuristic_a(simdiff: f64, threshold: f64) -> bool {
    simdiff > threshold
}

/// Self-contained linear classifier: scales, clipped weights, intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedClassifier {
    pub feature_names: Vec<String>,
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub scales: ColumnScales,
    #[serde(flatten)]
    pub params: SvmParams,
}

impl TrainedClassifier {
    /// Fits scales on `x`, trains on the scaled matrix, then clips.
    pub fn fit(
        x: &Matrix,
        labels: &[bool],
        feature_names: &[&str],
        params: &SvmParams,
    ) -> Result<(Self, SvmSolution)> {
        if feature_names.len() != x.cols() {
            return Err(Error::Shape {
                expected: x.cols(),
                found: feature_names.len(),
            });
        }
        let scales = ColumnScales::fit(x)?;
        let problem = SvmProblem::from_labels(scales.apply(x)?, labels)?;
        let solution = train_svc(&problem, params)?;
        let clf = Self {
            feature_names: feature_names.iter().map(|s| s.to_string()).collect(),
            weights: clip_negative(&solution.weights),
            intercept: solution.intercept,
            scales,
            params: *params,
        };
        Ok((clf, solution))
    }

    pub fn decision_score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::Shape {
                expected: self.weights.len(),
                found: x.len(),
            });
        }
        Ok(x.iter()
            .zip(&self.scales.0)
            .zip(&self.weights)
            .map(|((v, s), w)| v * s * w)
            .sum::<f64>()
            + self.intercept)
    }

    /// Positive class iff the decision score is strictly positive.
    pub fn predict(&self, x: &[f64]) -> Result<bool> {
        Ok(self.decision_score(x)? > 0.0)
    }

    pub fn predict_matrix(&self, x: &Matrix) -> Result<Vec<bool>> {
        x.iter_rows().map(|r| self.predict(r)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("classifier serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let clf: Self = serde_json::from_str(text)
            .map_err(|e| Error::Artifact(format!("classifier JSON: {e}")))?;
        let n = clf.weights.len();
        if clf.scales.len() != n || clf.feature_names.len() != n {
            return Err(Error::Artifact(
                "weights, scales and feature_names differ in length".into(),
            ));
        }
        Ok(clf)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}
