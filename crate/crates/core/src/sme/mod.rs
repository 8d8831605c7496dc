//! Relational inference over a knowledge graph with a compact Semantic
//! Matching Energy model: 10-dimensional relation embeddings interacting with
//! term embeddings through a 3-tensor.

pub mod artifact;
mod model;
mod sampling;
mod schema;
mod train;

pub use model::{cross_entropy, logistic, Example, SmeGradient, SmeModel, REL_DIM};
pub use sampling::{
    expand_positives, CorruptionKind, Corruptor, Positives, MAX_CORRUPTION_ATTEMPTS,
};
pub use schema::{
    Fact, KnowledgeGraph, Relation, RelationSchema, FEATURE_RELATIONS, GENERIC_RELATION,
};
pub use train::{
    initialize, train_sme, train_sme_logged, LossPoint, SmeHyperparams, TrainedSme, LOG_WINDOW,
    RELATION_INIT_RANGE, TERM_INIT_RANGE,
};

use crate::data::Triple;
use crate::error::Result;

pub const SME_FEATURE_COUNT: usize = 11;

/// Term-versus-term relation differences, in feature order:
/// `RelatedTo` (both directions summed), the eight other feature relations
/// with the term first, then `PartOf` and `AtLocation` with the attribute
/// first.
pub fn sme_features(model: &SmeModel, triple: &Triple) -> Result<[f64; SME_FEATURE_COUNT]> {
    let (t1, t2, att) = (
        triple.term1.as_str(),
        triple.term2.as_str(),
        triple.attribute.as_str(),
    );
    let s = |rel: &str, h: &str, t: &str| model.score(rel, h, t);
    let mut out = [0.0; SME_FEATURE_COUNT];

    let related = GENERIC_RELATION;
    out[0] = (s(related, t1, att)? + s(related, att, t1)?)
        - (s(related, t2, att)? + s(related, att, t2)?);
    for (slot, rel) in FEATURE_RELATIONS[1..].iter().enumerate() {
        out[slot + 1] = s(rel, t1, att)? - s(rel, t2, att)?;
    }
    for (slot, rel) in [(9, "PartOf"), (10, "AtLocation")] {
        out[slot] = s(rel, att, t1)? - s(rel, att, t2)?;
    }
    Ok(out)
}
