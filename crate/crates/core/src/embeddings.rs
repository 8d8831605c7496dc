//! Pretrained word vectors and the similarity measure shared by every
//! similarity-based feature.
//!
//! The text format is the common `word2vec`/Numberbatch layout: an optional
//! `count dim` header followed by one `token v1 ... vD` line per term.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct EmbeddingStore {
    vocab: HashMap<String, usize>,
    matrix: Vec<f64>,
    norms: Vec<f64>,
    dim: usize,
}

/// Result of a term lookup. `values` is all zeros when `found` is false.
#[derive(Debug, Clone, PartialEq)]
pub struct TermVector {
    pub values: Vec<f64>,
    pub found: bool,
}

impl EmbeddingStore {
    /// Builds a store from `(token, vector)` rows. Later duplicates of a token
    /// are ignored.
    pub fn from_rows<I, S>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut store = EmbeddingStore {
            vocab: HashMap::new(),
            matrix: Vec::new(),
            norms: Vec::new(),
            dim: 0,
        };
        for (i, (token, values)) in rows.into_iter().enumerate() {
            if i == 0 {
                if values.is_empty() {
                    return Err(Error::InvalidArgument(
                        "embedding rows must be non-empty".into(),
                    ));
                }
                store.dim = values.len();
            } else if values.len() != store.dim {
                return Err(Error::Shape {
                    expected: store.dim,
                    found: values.len(),
                });
            }
            store.push(token.into(), values);
        }
        if store.dim == 0 {
            return Err(Error::InvalidArgument("no embedding rows".into()));
        }
        Ok(store)
    }

    fn push(&mut self, token: String, values: Vec<f64>) {
        if self.vocab.contains_key(&token) {
            return;
        }
        let row = self.norms.len();
        self.norms
            .push(values.iter().map(|v| v * v).sum::<f64>().sqrt());
        self.matrix.extend(values);
        self.vocab.insert(token, row);
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut store = EmbeddingStore {
            vocab: HashMap::new(),
            matrix: Vec::new(),
            norms: Vec::new(),
            dim: 0,
        };
        let mut first_content = true;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let mut parts = line.split_whitespace();
            let Some(token) = parts.next() else {
                continue;
            };
            let rest: Vec<&str> = parts.collect();
            if first_content {
                first_content = false;
                if rest.len() == 1 && token.parse::<u64>().is_ok() && rest[0].parse::<u64>().is_ok()
                {
                    // `count dim` header
                    continue;
                }
            }
            let mut values = Vec::with_capacity(rest.len());
            for field in &rest {
                let v: f64 = field.parse().map_err(|_| {
                    Error::parse(path, line_no, format!("non-numeric component `{field}`"))
                })?;
                values.push(v);
            }
            if store.dim == 0 {
                if values.is_empty() {
                    return Err(Error::DimensionMismatch {
                        path: path.into(),
                        line: line_no,
                        expected: 1,
                        found: 0,
                    });
                }
                store.dim = values.len();
            } else if values.len() != store.dim {
                return Err(Error::DimensionMismatch {
                    path: path.into(),
                    line: line_no,
                    expected: store.dim,
                    found: values.len(),
                });
            }
            store.push(token.to_string(), values);
        }
        if store.dim == 0 {
            return Err(Error::EmptyFile { path: path.into() });
        }
        Ok(store)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.vocab.contains_key(token)
    }

    fn row(&self, idx: usize) -> &[f64] {
        &self.matrix[idx * self.dim..(idx + 1) * self.dim]
    }

    /// Row index of the first lookup candidate present in the vocabulary.
    pub fn resolve(&self, term: &str) -> Option<usize> {
        lookup_candidates(term)
            .iter()
            .find_map(|c| self.vocab.get(c.as_str()).copied())
    }

    /// Resolved vector for `term`, borrowed from the store.
    pub fn vector(&self, term: &str) -> Option<&[f64]> {
        self.resolve(term).map(|i| self.row(i))
    }

    pub fn lookup(&self, term: &str) -> TermVector {
        match self.vector(term) {
            Some(v) => TermVector {
                values: v.to_vec(),
                found: true,
            },
            None => TermVector {
                values: vec![0.0; self.dim],
                found: false,
            },
        }
    }

    /// `sqrt(max(cos(a, b), 0))`; zero when either term is missing or has a
    /// zero vector.
    pub fn sqrt_cosine(&self, a: &str, b: &str) -> f64 {
        match (self.resolve(a), self.resolve(b)) {
            (Some(i), Some(j)) => self.sqrt_cosine_rows(i, j),
            _ => 0.0,
        }
    }

    fn sqrt_cosine_rows(&self, i: usize, j: usize) -> f64 {
        let (ni, nj) = (self.norms[i], self.norms[j]);
        if ni == 0.0 || nj == 0.0 {
            return 0.0;
        }
        let dot: f64 = self
            .row(i)
            .iter()
            .zip(self.row(j))
            .map(|(x, y)| x * y)
            .sum();
        // rounding can push |cos| marginally past 1
        let cos = (dot / (ni * nj)).min(1.0);
        cos.max(0.0).sqrt()
    }
}

/// Candidate spellings tried by [`EmbeddingStore::lookup`], in order: the
/// trimmed term, its lowercase form, spaces replaced by underscores, then
/// de-pluralized forms of the last word (`ies`→`y`, strip `es`, strip `s`).
pub fn lookup_candidates(term: &str) -> Vec<String> {
    let exact = term.trim();
    if exact.is_empty() {
        return Vec::new();
    }
    let mut out: Vec<String> = Vec::with_capacity(6);
    let mut push = |s: String| {
        if !s.is_empty() && !out.contains(&s) {
            out.push(s);
        }
    };
    push(exact.to_string());
    let lower = exact.to_lowercase();
    push(lower.clone());
    let joined = lower.split_whitespace().collect::<Vec<_>>().join("_");
    push(joined.clone());

    let (prefix, last) = match joined.rfind('_') {
        Some(p) => joined.split_at(p + 1),
        None => ("", joined.as_str()),
    };
    if let Some(stem) = last.strip_suffix("ies") {
        push(format!("{prefix}{stem}y"));
    }
    if let Some(stem) = last.strip_suffix("es") {
        push(format!("{prefix}{stem}"));
    }
    if let Some(stem) = last.strip_suffix('s') {
        push(format!("{prefix}{stem}"));
    }
    out
}
