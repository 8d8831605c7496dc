//! Feature extraction and classification for discriminative attributes:
//! given `(term1, term2, attribute)`, decide whether the attribute applies to
//! term1 but not to term2.
//!
//! Fifteen features come from five sources (embedding similarity, a
//! knowledge-graph relation model, encyclopedia lead sections, a synonym and
//! gloss lexicon, and bigram significance). A column-normalized linear SVM
//! with negative weights clipped to zero makes the decision.

pub mod classifier;
pub mod data;
pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod lexical;
pub mod matrix;
pub mod sme;

pub use classifier::{ColumnScales, SvmParams, SvmProblem, TrainedClassifier};
pub use data::Triple;
pub use embeddings::EmbeddingStore;
pub use error::{Error, Result};
pub use features::{FeatureVector, ResourceBundle, FEATURE_COUNT, FEATURE_NAMES};
pub use matrix::Matrix;
pub use sme::SmeModel;
