//! Positive-example expansion and negative sampling by corruption.

use std::collections::HashSet;

use indexmap::IndexSet;
use rand::Rng;

use super::schema::{Fact, KnowledgeGraph, RelationSchema};
use crate::error::{Error, Result};

/// Attempts before falling back to exhaustive term replacement.
pub const MAX_CORRUPTION_ATTEMPTS: usize = 100;

/// Graph edges closed under relation generalization and reversal of
/// symmetric relations. Order is deterministic: original edges first, then
/// derived facts in discovery order.
#[derive(Debug, Clone)]
pub struct Positives {
    facts: Vec<Fact>,
    members: HashSet<Fact>,
}

impl Positives {
    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.members.contains(fact)
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn named<'a>(
        &self,
        kg: &'a KnowledgeGraph,
        schema: &'a RelationSchema,
    ) -> Vec<(&'a str, &'a str, &'a str)> {
        self.facts.iter().map(|f| f.named(kg, schema)).collect()
    }
}

pub fn expand_positives(kg: &KnowledgeGraph, schema: &RelationSchema) -> Result<Positives> {
    let mut facts: IndexSet<Fact> = kg.facts(schema)?.into_iter().collect();
    let mut cursor = 0;
    while cursor < facts.len() {
        let f = facts[cursor];
        cursor += 1;
        for &rel in schema.entailed_by(f.rel) {
            facts.insert(Fact { rel, ..f });
        }
        if schema.is_symmetric(f.rel) {
            facts.insert(Fact {
                rel: f.rel,
                head: f.tail,
                tail: f.head,
            });
        }
    }
    let members = facts.iter().copied().collect();
    Ok(Positives {
        facts: facts.into_iter().collect(),
        members,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptionKind {
    ReplaceHead,
    ReplaceTail,
    ReplaceRelation,
    FlipDirection,
}

/// Draws negatives for a fixed graph and schema.
#[derive(Debug, Clone)]
pub struct Corruptor<'a> {
    kg: &'a KnowledgeGraph,
    schema: &'a RelationSchema,
    positives: Positives,
    node_count: usize,
    /// Per relation: relations it may be replaced with (not itself, not
    /// anything it entails).
    replacements: Vec<Vec<usize>>,
}

impl<'a> Corruptor<'a> {
    pub fn new(kg: &'a KnowledgeGraph, schema: &'a RelationSchema) -> Result<Self> {
        let positives = expand_positives(kg, schema)?;
        Ok(Self::with_positives(kg, schema, positives))
    }

    pub fn with_positives(
        kg: &'a KnowledgeGraph,
        schema: &'a RelationSchema,
        positives: Positives,
    ) -> Self {
        let replacements = (0..schema.len())
            .map(|r| {
                let entailed = schema.entailed_by(r);
                (0..schema.len())
                    .filter(|&o| o != r && !entailed.contains(&o))
                    .collect()
            })
            .collect();
        Self {
            kg,
            schema,
            positives,
            node_count: kg.node_count(),
            replacements,
        }
    }

    pub fn positives(&self) -> &Positives {
        &self.positives
    }

    /// Corruption kinds that can change `fact`.
    pub fn applicable_kinds(&self, fact: &Fact) -> Vec<CorruptionKind> {
        let mut kinds = vec![CorruptionKind::ReplaceHead, CorruptionKind::ReplaceTail];
        if !self.replacements[fact.rel].is_empty() {
            kinds.push(CorruptionKind::ReplaceRelation);
        }
        if !self.schema.is_symmetric(fact.rel) && fact.head != fact.tail {
            kinds.push(CorruptionKind::FlipDirection);
        }
        kinds
    }

    fn other_node<R: Rng + ?Sized>(&self, current: usize, rng: &mut R) -> usize {
        let pick = rng.gen_range(0..self.node_count - 1);
        if pick >= current {
            pick + 1
        } else {
            pick
        }
    }

    /// Applies one corruption of the given kind (may produce a positive).
    pub fn apply<R: Rng + ?Sized>(&self, fact: &Fact, kind: CorruptionKind, rng: &mut R) -> Fact {
        match kind {
            CorruptionKind::ReplaceHead => Fact {
                head: self.other_node(fact.head, rng),
                ..*fact
            },
            CorruptionKind::ReplaceTail => Fact {
                tail: self.other_node(fact.tail, rng),
                ..*fact
            },
            CorruptionKind::ReplaceRelation => {
                let choices = &self.replacements[fact.rel];
                Fact {
                    rel: choices[rng.gen_range(0..choices.len())],
                    ..*fact
                }
            }
            CorruptionKind::FlipDirection => Fact {
                rel: fact.rel,
                head: fact.tail,
                tail: fact.head,
            },
        }
    }

    /// A negative example derived from `fact`: a uniformly chosen applicable
    /// corruption, resampled until it leaves the positive set. After
    /// [`MAX_CORRUPTION_ATTEMPTS`] it picks uniformly among all term
    /// replacements that are negatives.
    pub fn corrupt<R: Rng + ?Sized>(&self, fact: &Fact, rng: &mut R) -> Result<Fact> {
        if self.node_count < 2 || self.schema.len() < 2 {
            return Err(Error::Graph(
                "corruption needs at least 2 nodes and 2 relations".into(),
            ));
        }
        let kinds = self.applicable_kinds(fact);
        for _ in 0..MAX_CORRUPTION_ATTEMPTS {
            let kind = kinds[rng.gen_range(0..kinds.len())];
            let candidate = self.apply(fact, kind, rng);
            if !self.positives.contains(&candidate) {
                return Ok(candidate);
            }
        }
        let fallback: Vec<Fact> = (0..self.node_count)
            .filter(|&n| n != fact.head)
            .map(|head| Fact { head, ..*fact })
            .chain(
                (0..self.node_count)
                    .filter(|&n| n != fact.tail)
                    .map(|tail| Fact { tail, ..*fact }),
            )
            .filter(|f| !self.positives.contains(f))
            .collect();
        if fallback.is_empty() {
            let (rel, head, tail) = fact.named(self.kg, self.schema);
            return Err(Error::CorruptionExhausted {
                rel: rel.to_string(),
                head: head.to_string(),
                tail: tail.to_string(),
            });
        }
        Ok(fallback[rng.gen_range(0..fallback.len())])
    }
}
