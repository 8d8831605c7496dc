use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relations used as features, in feature order.
pub const FEATURE_RELATIONS: [&str; 9] = [
    "RelatedTo",
    "IsA",
    "HasA",
    "PartOf",
    "CapableOf",
    "UsedFor",
    "HasContext",
    "HasProperty",
    "AtLocation",
];

pub const GENERIC_RELATION: &str = "RelatedTo";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    #[serde(default)]
    pub symmetric: bool,
    /// More general relations implied by this one.
    #[serde(default)]
    pub entails: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct SchemaFile {
    relations: Vec<Relation>,
}

/// Ordered relation list with symmetry flags and the transitive closure of
/// the entailment relation.
#[derive(Debug, Clone)]
pub struct RelationSchema {
    relations: Vec<Relation>,
    index: HashMap<String, usize>,
    entailed: Vec<Vec<usize>>,
}

impl RelationSchema {
    pub fn new(relations: Vec<Relation>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, r) in relations.iter().enumerate() {
            if r.name.is_empty() {
                return Err(Error::Schema("empty relation name".into()));
            }
            if index.insert(r.name.clone(), i).is_some() {
                return Err(Error::Schema(format!("duplicate relation `{}`", r.name)));
            }
        }
        let mut direct = Vec::with_capacity(relations.len());
        for r in &relations {
            let mut targets = Vec::new();
            for e in &r.entails {
                if *e == r.name {
                    return Err(Error::Schema(format!("`{}` entails itself", r.name)));
                }
                let j = *index.get(e).ok_or_else(|| {
                    Error::Schema(format!("`{}` entails unknown relation `{e}`", r.name))
                })?;
                if !targets.contains(&j) {
                    targets.push(j);
                }
            }
            direct.push(targets);
        }
        let entailed = (0..relations.len())
            .map(|start| {
                let mut seen: IndexSet<usize> = IndexSet::new();
                let mut stack = direct[start].clone();
                while let Some(j) = stack.pop() {
                    if j != start && seen.insert(j) {
                        stack.extend(direct[j].iter().copied());
                    }
                }
                let mut v: Vec<usize> = seen.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect();
        Ok(Self {
            relations,
            index,
            entailed,
        })
    }

    /// The nine feature relations plus `extras` (in order, skipping known
    /// names). Everything entails `RelatedTo`, which is the only symmetric
    /// relation.
    pub fn default_with<'a>(extras: impl IntoIterator<Item = &'a str>) -> Self {
        let mut names: IndexSet<String> = FEATURE_RELATIONS.iter().map(|s| s.to_string()).collect();
        names.extend(extras.into_iter().map(str::to_string));
        let relations = names
            .into_iter()
            .map(|name| {
                let generic = name == GENERIC_RELATION;
                Relation {
                    symmetric: generic,
                    entails: if generic {
                        vec![]
                    } else {
                        vec![GENERIC_RELATION.to_string()]
                    },
                    name,
                }
            })
            .collect();
        Self::new(relations).expect("default schema is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: SchemaFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.into(),
            line: e.line(),
            message: e.to_string(),
        })?;
        Self::new(file.relations)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SchemaFile {
            relations: self.relations.clone(),
        })
        .expect("schema serializes")
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.relations[idx].name
    }

    pub fn is_symmetric(&self, idx: usize) -> bool {
        self.relations[idx].symmetric
    }

    /// Every relation reachable from `idx` through `entails`, excluding `idx`.
    pub fn entailed_by(&self, idx: usize) -> &[usize] {
        &self.entailed[idx]
    }
}

/// Relation-labelled directed edges over a set of term nodes.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    nodes: IndexSet<String>,
    edges: Vec<(String, usize, usize)>,
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, term: &str) -> usize {
        self.nodes.insert_full(term.to_string()).0
    }

    pub fn add_edge(&mut self, rel: &str, head: &str, tail: &str) {
        let h = self.add_node(head);
        let t = self.add_node(tail);
        self.edges.push((rel.to_string(), h, t));
    }

    /// Reads `relation<TAB>head<TAB>tail` lines; `#` lines are comments.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut kg = Self::new();
        for (idx, line) in text.lines().enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            match fields.as_slice() {
                [rel, head, tail] if !rel.is_empty() && !head.is_empty() && !tail.is_empty() => {
                    kg.add_edge(rel, head, tail)
                }
                _ => {
                    return Err(Error::parse(
                        path,
                        idx + 1,
                        "expected `relation<TAB>head<TAB>tail`",
                    ))
                }
            }
        }
        Ok(kg)
    }

    pub fn nodes(&self) -> &IndexSet<String> {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, idx: usize) -> &str {
        &self.nodes[idx]
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.edges
            .iter()
            .map(|(r, h, t)| (r.as_str(), self.node(*h), self.node(*t)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Relation names in order of first appearance.
    pub fn relation_names(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.edges
            .iter()
            .map(|(r, _, _)| r.as_str())
            .filter(|r| seen.insert(*r))
            .collect()
    }

    pub fn validate(&self, schema: &RelationSchema) -> Result<()> {
        for (r, h, t) in self.edges() {
            if schema.index_of(r).is_none() {
                return Err(Error::Graph(format!(
                    "edge ({r}, {h}, {t}) uses a relation missing from the schema"
                )));
            }
        }
        Ok(())
    }

    /// Edges as index triples; fails on relations missing from `schema`.
    pub(crate) fn facts(&self, schema: &RelationSchema) -> Result<Vec<Fact>> {
        self.edges
            .iter()
            .map(|(r, h, t)| {
                let rel = schema
                    .index_of(r)
                    .ok_or_else(|| Error::UnknownRelation(r.clone()))?;
                Ok(Fact {
                    rel,
                    head: *h,
                    tail: *t,
                })
            })
            .collect()
    }
}

/// A triple over schema relation indices and graph node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fact {
    pub rel: usize,
    pub head: usize,
    pub tail: usize,
}

impl Fact {
    pub fn named<'a>(
        &self,
        kg: &'a KnowledgeGraph,
        schema: &'a RelationSchema,
    ) -> (&'a str, &'a str, &'a str) {
        (
            schema.name(self.rel),
            kg.node(self.head),
            kg.node(self.tail),
        )
    }
}
