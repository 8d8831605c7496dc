//! Central finite differences for the relation model's summed loss.

use discatt::sme::{Example, SmeGradient, SmeModel, REL_DIM};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const STEP: f64 = 1e-5;
pub const MAX_RELATIVE_ERROR: f64 = 1e-4;
/// Components smaller than this are compared absolutely.
pub const FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug)]
pub enum Param {
    Term(usize, usize),
    Relation(usize, usize),
    Tensor(usize),
    Bias(usize),
}

pub fn slot(m: &mut SmeModel, p: Param) -> &mut f64 {
    match p {
        Param::Term(t, i) => &mut m.term_embedding_mut(t)[i],
        Param::Relation(r, k) => &mut m.relation_embedding_mut(r)[k],
        Param::Tensor(i) => &mut m.tensor_mut()[i],
        Param::Bias(r) => &mut m.bias_mut()[r],
    }
}

pub fn random_model(rng: &mut ChaCha8Rng) -> SmeModel {
    let n_terms = rng.gen_range(3..=6);
    let n_rel = rng.gen_range(1..=3);
    let dim = rng.gen_range(1..=8);
    let terms = (0..n_terms).map(|i| format!("t{i}")).collect();
    let rels = (0..n_rel).map(|i| format!("r{i}")).collect();
    let mut m = SmeModel::zeros(terms, rels, dim);
    let mut fill = |xs: &mut [f64]| xs.iter_mut().for_each(|x| *x = rng.gen_range(-0.6..0.6));
    for t in 0..n_terms {
        fill(m.term_embedding_mut(t));
    }
    for r in 0..n_rel {
        fill(m.relation_embedding_mut(r));
    }
    fill(m.tensor_mut());
    fill(m.bias_mut());
    m
}

pub fn random_examples(m: &SmeModel, rng: &mut ChaCha8Rng) -> Vec<Example> {
    let n_terms = m.terms().len();
    let mut out: Vec<Example> = (0..4)
        .map(|i| Example {
            rel: rng.gen_range(0..m.relations().len()),
            head: rng.gen_range(0..n_terms),
            tail: rng.gen_range(0..n_terms),
            target: if i == 0 { 1.0 } else { 0.0 },
        })
        .collect();
    // a self-loop exercises the head and tail paths into the same row
    out.push(Example {
        rel: 0,
        head: 1,
        tail: 1,
        target: 1.0,
    });
    out
}

pub fn component(g: &SmeGradient, p: Param) -> f64 {
    match p {
        Param::Term(t, i) => g.terms.get(&t).map_or(0.0, |row| row[i]),
        Param::Relation(r, k) => g.relations[r * REL_DIM + k],
        Param::Tensor(i) => g.tensor[i],
        Param::Bias(r) => g.bias[r],
    }
}

pub fn numeric(m: &SmeModel, examples: &[Example], p: Param) -> f64 {
    let mut plus = m.clone();
    *slot(&mut plus, p) += STEP;
    let mut minus = m.clone();
    *slot(&mut minus, p) -= STEP;
    (plus.loss_and_gradient(examples).0 - minus.loss_and_gradient(examples).0) / (2.0 * STEP)
}

pub fn all_params(m: &SmeModel) -> Vec<Param> {
    let d = m.term_dim();
    let mut out = Vec::new();
    for t in 0..m.terms().len() {
        out.extend((0..d).map(|i| Param::Term(t, i)));
    }
    for r in 0..m.relations().len() {
        out.extend((0..REL_DIM).map(|k| Param::Relation(r, k)));
        out.push(Param::Bias(r));
    }
    out.extend((0..m.tensor().len()).map(Param::Tensor));
    out
}

/// Largest per-component relative error between the analytic and numeric
/// gradients of `examples` under `m`.
pub fn max_relative_error(m: &SmeModel, examples: &[Example]) -> f64 {
    let (_, g) = m.loss_and_gradient(examples);
    all_params(m)
        .into_iter()
        .map(|p| {
            let (a, n) = (component(&g, p), numeric(m, examples, p));
            (a - n).abs() / a.abs().max(n.abs()).max(FLOOR)
        })
        .fold(0.0, f64::max)
}
