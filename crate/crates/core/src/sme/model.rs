use std::collections::{BTreeMap, HashMap};

use crate::embeddings::lookup_candidates;
use crate::error::{Error, Result};

/// Length of every relation embedding.
pub const REL_DIM: usize = 10;

pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `-[y ln s(z) + (1 - y) ln(1 - s(z))]` without overflow.
pub fn cross_entropy(z: f64, target: f64) -> f64 {
    let softplus = z.max(0.0) + (-z.abs()).exp().ln_1p();
    softplus - target * z
}

/// Semantic-matching scorer: `s(r, h, t) = logistic(e_h · M_r · e_t + b_r)`
/// with `M_r = Σ_k rel_r[k] · T[.., .., k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmeModel {
    term_dim: usize,
    terms: Vec<String>,
    term_index: HashMap<String, usize>,
    relations: Vec<String>,
    relation_index: HashMap<String, usize>,
    /// `terms.len() × term_dim`, row-major.
    term_embeddings: Vec<f64>,
    /// `relations.len() × REL_DIM`, row-major.
    relation_embeddings: Vec<f64>,
    /// `term_dim × term_dim × REL_DIM`, indexed `(i * term_dim + j) * REL_DIM + k`.
    tensor: Vec<f64>,
    bias: Vec<f64>,
}

/// Gradient of a summed loss. Term rows are sparse.
#[derive(Debug, Clone, PartialEq)]
pub struct SmeGradient {
    pub terms: BTreeMap<usize, Vec<f64>>,
    pub relations: Vec<f64>,
    pub tensor: Vec<f64>,
    pub bias: Vec<f64>,
}

/// One training example over model indices; `target` is 1 or 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example {
    pub rel: usize,
    pub head: usize,
    pub tail: usize,
    pub target: f64,
}

impl SmeModel {
    /// All-zero model over the given vocabularies.
    pub fn zeros(terms: Vec<String>, relations: Vec<String>, term_dim: usize) -> Self {
        let term_index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let relation_index = relations
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), i))
            .collect();
        Self {
            term_dim,
            term_embeddings: vec![0.0; terms.len() * term_dim],
            relation_embeddings: vec![0.0; relations.len() * REL_DIM],
            tensor: vec![0.0; term_dim * term_dim * REL_DIM],
            bias: vec![0.0; relations.len()],
            terms,
            term_index,
            relations,
            relation_index,
        }
    }

    pub(crate) fn from_parts(
        terms: Vec<String>,
        relations: Vec<String>,
        term_dim: usize,
        term_embeddings: Vec<f64>,
        relation_embeddings: Vec<f64>,
        tensor: Vec<f64>,
        bias: Vec<f64>,
    ) -> Result<Self> {
        let mut m = Self::zeros(terms, relations, term_dim);
        if m.term_index.len() != m.terms.len() || m.relation_index.len() != m.relations.len() {
            return Err(Error::Artifact("duplicate vocabulary entry".into()));
        }
        let check = |name: &str, want: usize, got: usize| {
            if want == got {
                Ok(())
            } else {
                Err(Error::Artifact(format!(
                    "{name}: expected {want} values, got {got}"
                )))
            }
        };
        check(
            "term embeddings",
            m.term_embeddings.len(),
            term_embeddings.len(),
        )?;
        check(
            "relation embeddings",
            m.relation_embeddings.len(),
            relation_embeddings.len(),
        )?;
        check("tensor", m.tensor.len(), tensor.len())?;
        check("bias", m.bias.len(), bias.len())?;
        m.term_embeddings = term_embeddings;
        m.relation_embeddings = relation_embeddings;
        m.tensor = tensor;
        m.bias = bias;
        Ok(m)
    }

    pub fn term_dim(&self) -> usize {
        self.term_dim
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn relations(&self) -> &[String] {
        &self.relations
    }

    pub fn relation_id(&self, name: &str) -> Result<usize> {
        self.relation_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))
    }

    /// Term index via the embedding lookup chain; `None` for unknown terms.
    pub fn term_id(&self, term: &str) -> Option<usize> {
        if let Some(&i) = self.term_index.get(term) {
            return Some(i);
        }
        lookup_candidates(term)
            .iter()
            .find_map(|c| self.term_index.get(c).copied())
    }

    pub fn term_embedding(&self, idx: usize) -> &[f64] {
        &self.term_embeddings[idx * self.term_dim..(idx + 1) * self.term_dim]
    }

    pub fn term_embedding_mut(&mut self, idx: usize) -> &mut [f64] {
        &mut self.term_embeddings[idx * self.term_dim..(idx + 1) * self.term_dim]
    }

    pub fn relation_embedding(&self, idx: usize) -> &[f64] {
        &self.relation_embeddings[idx * REL_DIM..(idx + 1) * REL_DIM]
    }

    pub fn relation_embedding_mut(&mut self, idx: usize) -> &mut [f64] {
        &mut self.relation_embeddings[idx * REL_DIM..(idx + 1) * REL_DIM]
    }

    pub fn tensor(&self) -> &[f64] {
        &self.tensor
    }

    pub fn tensor_mut(&mut self) -> &mut [f64] {
        &mut self.tensor
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    pub(crate) fn term_embeddings_flat(&self) -> &[f64] {
        &self.term_embeddings
    }

    pub(crate) fn relation_embeddings_flat(&self) -> &[f64] {
        &self.relation_embeddings
    }

    /// `M_r`, `term_dim × term_dim` row-major.
    fn interaction(&self, rel: usize) -> Vec<f64> {
        let r = self.relation_embedding(rel);
        self.tensor
            .chunks_exact(REL_DIM)
            .map(|slice| slice.iter().zip(r).map(|(t, w)| t * w).sum())
            .collect()
    }

    fn bilinear(&self, m: &[f64], head: &[f64], tail: &[f64]) -> f64 {
        let d = self.term_dim;
        let mut z = 0.0;
        for (i, h) in head.iter().enumerate() {
            if *h == 0.0 {
                continue;
            }
            let row = &m[i * d..(i + 1) * d];
            z += h * row.iter().zip(tail).map(|(a, b)| a * b).sum::<f64>();
        }
        z
    }

    fn energy_vectors(&self, rel: usize, head: &[f64], tail: &[f64]) -> f64 {
        let m = self.interaction(rel);
        self.bilinear(&m, head, tail) + self.bias[rel]
    }

    /// Pre-activation score for term indices.
    pub fn energy(&self, rel: usize, head: usize, tail: usize) -> f64 {
        self.energy_vectors(rel, self.term_embedding(head), self.term_embedding(tail))
    }

    /// Confidence in `(rel, head, tail)`; unknown terms use the zero vector.
    pub fn score(&self, rel: &str, head: &str, tail: &str) -> Result<f64> {
        let r = self.relation_id(rel)?;
        let zero = vec![0.0; self.term_dim];
        let vec_of = |t: &str| match self.term_id(t) {
            Some(i) => self.term_embedding(i),
            None => zero.as_slice(),
        };
        let s = logistic(self.energy_vectors(r, vec_of(head), vec_of(tail)));
        // keep saturated scores inside the open interval
        Ok(s.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0))
    }

    /// Summed cross-entropy over `examples` and its gradient.
    pub fn loss_and_gradient(&self, examples: &[Example]) -> (f64, SmeGradient) {
        let d = self.term_dim;
        let mut grad = SmeGradient {
            terms: BTreeMap::new(),
            relations: vec![0.0; self.relation_embeddings.len()],
            tensor: vec![0.0; self.tensor.len()],
            bias: vec![0.0; self.bias.len()],
        };
        let mut loss = 0.0;
        for ex in examples {
            let m = self.interaction(ex.rel);
            let head = self.term_embedding(ex.head);
            let tail = self.term_embedding(ex.tail);
            let z = self.bilinear(&m, head, tail) + self.bias[ex.rel];
            loss += cross_entropy(z, ex.target);
            let g = logistic(z) - ex.target;

            // d z / d e_head = M e_tail ; d z / d e_tail = M^T e_head
            let mut g_head = vec![0.0; d];
            let mut g_tail = vec![0.0; d];
            for i in 0..d {
                for j in 0..d {
                    let mij = m[i * d + j];
                    g_head[i] += g * mij * tail[j];
                    g_tail[j] += g * mij * head[i];
                }
            }
            for (idx, part) in [(ex.head, g_head), (ex.tail, g_tail)] {
                let acc = grad.terms.entry(idx).or_insert_with(|| vec![0.0; d]);
                acc.iter_mut().zip(part).for_each(|(a, p)| *a += p);
            }

            let rel = self.relation_embedding(ex.rel);
            let g_rel = &mut grad.relations[ex.rel * REL_DIM..(ex.rel + 1) * REL_DIM];
            for i in 0..d {
                for j in 0..d {
                    let w = g * head[i] * tail[j];
                    if w == 0.0 {
                        continue;
                    }
                    let base = (i * d + j) * REL_DIM;
                    let slice = &self.tensor[base..base + REL_DIM];
                    for k in 0..REL_DIM {
                        g_rel[k] += w * slice[k];
                        grad.tensor[base + k] += w * rel[k];
                    }
                }
            }
            grad.bias[ex.rel] += g;
        }
        (loss, grad)
    }

    /// `params -= step * grad`.
    pub fn apply_gradient(&mut self, grad: &SmeGradient, step: f64) {
        for (&idx, g) in &grad.terms {
            self.term_embedding_mut(idx)
                .iter_mut()
                .zip(g)
                .for_each(|(p, g)| *p -= step * g);
        }
        let pairs = [
            (&mut self.relation_embeddings, &grad.relations),
            (&mut self.tensor, &grad.tensor),
            (&mut self.bias, &grad.bias),
        ];
        for (params, g) in pairs {
            params.iter_mut().zip(g).for_each(|(p, g)| *p -= step * g);
        }
    }
}
