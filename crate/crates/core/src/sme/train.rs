use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{Example, SmeModel, REL_DIM};
use super::sampling::Corruptor;
use super::schema::{KnowledgeGraph, RelationSchema};
use crate::embeddings::EmbeddingStore;
use crate::error::{Error, Result};

/// Half-width of the uniform initialization of term embeddings.
pub const TERM_INIT_RANGE: f64 = 0.05;
/// Half-width of the uniform initialization of relation embeddings.
pub const RELATION_INIT_RANGE: f64 = 0.5;
/// Steps per loss-log window.
pub const LOG_WINDOW: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmeHyperparams {
    pub learning_rate: f64,
    pub iterations: usize,
    pub negatives_per_positive: usize,
    pub term_dim: usize,
    pub seed: u64,
    /// Copy the first `term_dim` embedding components into matching terms.
    pub init_from_embeddings: bool,
}

impl Default for SmeHyperparams {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            iterations: 50_000,
            negatives_per_positive: 3,
            term_dim: 32,
            seed: 0,
            init_from_embeddings: false,
        }
    }
}

impl SmeHyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(
                "learning_rate must be positive".into(),
            ));
        }
        if self.negatives_per_positive == 0 {
            return Err(Error::InvalidArgument(
                "negatives_per_positive must be >= 1".into(),
            ));
        }
        if self.term_dim == 0 {
            return Err(Error::InvalidArgument("term_dim must be positive".into()));
        }
        Ok(())
    }
}

/// Mean per-example loss over a window of steps ending at `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossPoint {
    pub step: usize,
    pub mean_loss: f64,
}

#[derive(Debug, Clone)]
pub struct TrainedSme {
    pub model: SmeModel,
    pub loss_log: Vec<LossPoint>,
}

/// Random initial parameters. Term embeddings and relation embeddings are
/// uniform in `±TERM_INIT_RANGE` and `±RELATION_INIT_RANGE`; tensor entries
/// are uniform in `±1/sqrt(term_dim)`; biases start at zero.
pub fn initialize(
    kg: &KnowledgeGraph,
    schema: &RelationSchema,
    hp: &SmeHyperparams,
    init: Option<&EmbeddingStore>,
    rng: &mut ChaCha8Rng,
) -> SmeModel {
    let terms: Vec<String> = kg.nodes().iter().cloned().collect();
    let relations: Vec<String> = schema.relations().iter().map(|r| r.name.clone()).collect();
    let d = hp.term_dim;
    let mut model = SmeModel::zeros(terms, relations, d);
    for i in 0..model.terms().len() {
        for v in model.term_embedding_mut(i) {
            *v = rng.gen_range(-TERM_INIT_RANGE..=TERM_INIT_RANGE);
        }
    }
    for r in 0..schema.len() {
        for v in model.relation_embedding_mut(r) {
            *v = rng.gen_range(-RELATION_INIT_RANGE..=RELATION_INIT_RANGE);
        }
    }
    let t = 1.0 / (d as f64).sqrt();
    for v in model.tensor_mut() {
        *v = rng.gen_range(-t..=t);
    }
    if let Some(store) = init.filter(|_| hp.init_from_embeddings) {
        let n = d.min(store.dim());
        for i in 0..model.terms().len() {
            if let Some(src) = store.vector(&model.terms()[i]) {
                let src = src[..n].to_vec();
                model.term_embedding_mut(i)[..n].copy_from_slice(&src);
            }
        }
    }
    debug_assert_eq!(model.relation_embedding(0).len(), REL_DIM);
    model
}

pub fn train_sme(
    kg: &KnowledgeGraph,
    schema: &RelationSchema,
    hp: &SmeHyperparams,
) -> Result<SmeModel> {
    train_sme_logged(kg, schema, hp, None).map(|t| t.model)
}

/// Plain SGD on binary cross-entropy. Each step draws one expanded positive
/// and `negatives_per_positive` corruptions of it and takes one gradient
/// step on their summed loss.
pub fn train_sme_logged(
    kg: &KnowledgeGraph,
    schema: &RelationSchema,
    hp: &SmeHyperparams,
    init: Option<&EmbeddingStore>,
) -> Result<TrainedSme> {
    hp.validate()?;
    if kg.is_empty() {
        return Err(Error::Graph("knowledge graph has no edges".into()));
    }
    kg.validate(schema)?;
    let corruptor = Corruptor::new(kg, schema)?;
    let positives = corruptor.positives().facts().to_vec();

    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut model = initialize(kg, schema, hp, init, &mut rng);
    let mut loss_log = Vec::new();
    let mut window_loss = 0.0;
    let mut window_steps = 0usize;
    let mut batch = Vec::with_capacity(1 + hp.negatives_per_positive);

    for step in 1..=hp.iterations {
        let pos = positives[rng.gen_range(0..positives.len())];
        batch.clear();
        batch.push(Example {
            rel: pos.rel,
            head: pos.head,
            tail: pos.tail,
            target: 1.0,
        });
        for _ in 0..hp.negatives_per_positive {
            let neg = corruptor.corrupt(&pos, &mut rng)?;
            batch.push(Example {
                rel: neg.rel,
                head: neg.head,
                tail: neg.tail,
                target: 0.0,
            });
        }
        let (loss, grad) = model.loss_and_gradient(&batch);
        if !loss.is_finite() {
            return Err(Error::Numerical(format!("non-finite loss at step {step}")));
        }
        model.apply_gradient(&grad, hp.learning_rate);

        window_loss += loss / batch.len() as f64;
        window_steps += 1;
        if window_steps == LOG_WINDOW || step == hp.iterations {
            loss_log.push(LossPoint {
                step,
                mean_loss: window_loss / window_steps as f64,
            });
            window_loss = 0.0;
            window_steps = 0;
        }
    }
    Ok(TrainedSme { model, loss_log })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (KnowledgeGraph, RelationSchema) {
        let mut kg = KnowledgeGraph::new();
        kg.add_edge("IsA", "frog", "animal");
        kg.add_edge("IsA", "snail", "animal");
        kg.add_edge("IsA", "rose", "plant");
        (kg, RelationSchema::default_with([]))
    }

    #[test]
    fn zero_iterations_is_initialization() {
        let (kg, schema) = toy();
        let hp = SmeHyperparams {
            iterations: 0,
            term_dim: 4,
            seed: 9,
            ..Default::default()
        };
        let trained = train_sme(&kg, &schema, &hp).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(trained, initialize(&kg, &schema, &hp, None, &mut rng));
    }

    #[test]
    fn deterministic_for_seed() {
        let (kg, schema) = toy();
        let hp = SmeHyperparams {
            iterations: 500,
            term_dim: 4,
            seed: 3,
            ..Default::default()
        };
        let a = train_sme(&kg, &schema, &hp).unwrap();
        let b = train_sme(&kg, &schema, &hp).unwrap();
        assert_eq!(a, b);
        let c = train_sme(&kg, &schema, &SmeHyperparams { seed: 4, ..hp }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (_, schema) = toy();
        assert!(train_sme(&KnowledgeGraph::new(), &schema, &SmeHyperparams::default()).is_err());
        let (kg, schema) = toy();
        let hp = SmeHyperparams {
            negatives_per_positive: 0,
            ..Default::default()
        };
        assert!(train_sme(&kg, &schema, &hp).is_err());
    }

    #[test]
    fn embedding_initialization() {
        let (kg, schema) = toy();
        let store =
            EmbeddingStore::from_rows(vec![("frog", vec![0.9, 0.8, 0.7, 0.6, 0.5])]).unwrap();
        let hp = SmeHyperparams {
            term_dim: 3,
            init_from_embeddings: true,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = initialize(&kg, &schema, &hp, Some(&store), &mut rng);
        assert_eq!(
            m.term_embedding(m.term_id("frog").unwrap()),
            &[0.9, 0.8, 0.7]
        );
    }

    #[test]
    fn loss_log_windows() {
        let (kg, schema) = toy();
        let hp = SmeHyperparams {
            iterations: 2500,
            term_dim: 4,
            ..Default::default()
        };
        let t = train_sme_logged(&kg, &schema, &hp, None).unwrap();
        let steps: Vec<usize> = t.loss_log.iter().map(|p| p.step).collect();
        assert_eq!(steps, vec![1000, 2000, 2500]);
    }
}
