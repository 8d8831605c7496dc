//! The 15-dimensional feature vector. Every feature is a difference between
//! a term1 score and the matching term2 score, so swapping the terms negates
//! the whole vector.

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::data::Triple;
use crate::embeddings::EmbeddingStore;
use crate::error::Result;
use crate::lexical::{
    lead_max_similarity, lexicon_max_similarity, ngram_significance, LeadSectionCorpus, Lexicon,
    NgramCounts,
};
use crate::matrix::Matrix;
use crate::sme::{self, sme_features, SmeModel};

pub const FEATURE_COUNT: usize = 15;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "vector_similarity",
    "sme_relatedto",
    "sme_isa",
    "sme_hasa",
    "sme_partof",
    "sme_capableof",
    "sme_usedfor",
    "sme_hascontext",
    "sme_hasproperty",
    "sme_atlocation",
    "sme_partof_swapped",
    "sme_atlocation_swapped",
    "wikipedia_lead",
    "wordnet_relatedness",
    "google_ngrams",
];

pub const VECTOR_SIMILARITY: usize = 0;
pub const WIKIPEDIA_LEAD: usize = 12;
pub const WORDNET: usize = 13;
pub const GOOGLE_NGRAMS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub values: [f64; FEATURE_COUNT],
}

impl FeatureVector {
    pub fn names() -> &'static [&'static str; FEATURE_COUNT] {
        &FEATURE_NAMES
    }
}

/// Everything feature extraction reads. Immutable once loaded.
#[derive(Debug, Clone)]
pub struct ResourceBundle {
    pub embeddings: EmbeddingStore,
    pub leads: LeadSectionCorpus,
    pub lexicon: Lexicon,
    pub ngrams: NgramCounts,
    pub sme_model: SmeModel,
}

#[derive(Debug, Clone)]
pub struct BundlePaths {
    pub embeddings: PathBuf,
    pub leads: PathBuf,
    pub lexicon: PathBuf,
    pub unigrams: PathBuf,
    pub bigrams: PathBuf,
    pub sme_model: PathBuf,
}

impl ResourceBundle {
    pub fn load(paths: &BundlePaths) -> Result<Self> {
        Ok(Self {
            embeddings: EmbeddingStore::load(&paths.embeddings)?,
            leads: LeadSectionCorpus::load(&paths.leads)?,
            lexicon: Lexicon::load(&paths.lexicon)?,
            ngrams: NgramCounts::load(&paths.unigrams, &paths.bigrams)?,
            sme_model: sme::artifact::load(&paths.sme_model)?,
        })
    }
}

pub fn vector_similarity_feature(store: &EmbeddingStore, t: &Triple) -> f64 {
    store.sqrt_cosine(&t.term1, &t.attribute) - store.sqrt_cosine(&t.term2, &t.attribute)
}

pub fn extract(t: &Triple, r: &ResourceBundle) -> Result<FeatureVector> {
    let mut values = [0.0; FEATURE_COUNT];
    let att = t.attribute.as_str();
    values[VECTOR_SIMILARITY] = vector_similarity_feature(&r.embeddings, t);
    values[1..12].copy_from_slice(&sme_features(&r.sme_model, t)?);
    values[WIKIPEDIA_LEAD] = lead_max_similarity(&r.leads, &r.embeddings, &t.term1, att)
        - lead_max_similarity(&r.leads, &r.embeddings, &t.term2, att);
    values[WORDNET] = lexicon_max_similarity(&r.lexicon, &r.embeddings, &t.term1, att)
        - lexicon_max_similarity(&r.lexicon, &r.embeddings, &t.term2, att);
    values[GOOGLE_NGRAMS] =
        ngram_significance(&r.ngrams, &t.term1, att) - ngram_significance(&r.ngrams, &t.term2, att);
    Ok(FeatureVector { values })
}

/// Feature rows for `triples`, in input order, plus labels when every triple
/// carries one.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub x: Matrix,
    pub labels: Option<Vec<bool>>,
}

impl FeatureMatrix {
    /// CSV with a header of the feature names (and `label` when present).
    pub fn to_csv(&self) -> String {
        let mut out = FEATURE_NAMES.join(",");
        if self.labels.is_some() {
            out.push_str(",label");
        }
        out.push('\n');
        for (i, row) in self.x.iter_rows().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(","));
            if let Some(labels) = &self.labels {
                let _ = write!(out, ",{}", u8::from(labels[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Extracts every row. With `require_labels`, an unlabeled triple is an
/// error; otherwise labels are kept only if all triples have one.
pub fn build_matrix(
    triples: &[Triple],
    r: &ResourceBundle,
    require_labels: bool,
) -> Result<FeatureMatrix> {
    let labels = if require_labels {
        Some(crate::data::labels(triples)?)
    } else {
        crate::data::labels(triples).ok()
    };
    let rows = triples
        .par_iter()
        .map(|t| extract(t, r).map(|f| f.values))
        .collect::<Result<Vec<_>>>()?;
    let x = Matrix::from_rows(FEATURE_COUNT, &rows)?;
    Ok(FeatureMatrix { x, labels })
}
