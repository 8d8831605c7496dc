//! Auxiliary text resources: encyclopedia lead sections, a synonym/gloss
//! lexicon and unigram/bigram counts, plus the per-(term, attribute) scores
//! computed from each.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::embeddings::{lookup_candidates, EmbeddingStore};
use crate::error::{Error, Result};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn find_entry<'a, V>(map: &'a HashMap<String, V>, term: &str) -> Option<&'a V> {
    lookup_candidates(term).iter().find_map(|c| map.get(c))
}

/// Highest `sqrt_cosine(att, w)` over `words`, or 0 for an empty iterator.
fn max_similarity<'a>(
    store: &EmbeddingStore,
    att: &str,
    words: impl IntoIterator<Item = &'a str>,
) -> f64 {
    words
        .into_iter()
        .map(|w| store.sqrt_cosine(att, w))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct LeadEntry {
    pub title_tokens: Vec<String>,
    pub tokens: Vec<String>,
}

/// Article title → lowercased lead-section words.
#[derive(Debug, Clone, Default)]
pub struct LeadSectionCorpus {
    entries: HashMap<String, LeadEntry>,
}

impl LeadSectionCorpus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an article; an existing title keeps its first lead section.
    pub fn insert(&mut self, title: &str, lead: &str) {
        let title = title.trim();
        if title.is_empty() || self.entries.contains_key(title) {
            return;
        }
        let title_tokens = title
            .split(|c: char| c.is_whitespace() || c == '_')
            .filter(|t| !t.is_empty())
            .map(str::to_lowercase)
            .collect();
        let tokens = lead.split_whitespace().map(str::to_lowercase).collect();
        self.entries.insert(
            title.to_string(),
            LeadEntry {
                title_tokens,
                tokens,
            },
        );
    }

    /// Reads `title<TAB>space separated tokens` lines.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut corpus = Self::new();
        for (idx, line) in read(path)?.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (title, lead) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, idx + 1, "expected `title<TAB>tokens`"))?;
            corpus.insert(title, lead);
        }
        Ok(corpus)
    }

    pub fn get(&self, term: &str) -> Option<&LeadEntry> {
        find_entry(&self.entries, term)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Max similarity between `att` and any title or lead token of `term`'s
/// article; falls back to `sqrt_cosine(term, att)` when there is no article.
pub fn lead_max_similarity(
    corpus: &LeadSectionCorpus,
    store: &EmbeddingStore,
    term: &str,
    att: &str,
) -> f64 {
    match corpus.get(term) {
        Some(entry) => max_similarity(
            store,
            att,
            entry
                .title_tokens
                .iter()
                .chain(&entry.tokens)
                .map(String::as_str),
        ),
        None => store.sqrt_cosine(term, att),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
pub struct LexiconEntry {
    #[serde(default)]
    pub synonyms: Vec<String>,
    #[serde(default)]
    pub related: Vec<String>,
    #[serde(default)]
    pub gloss_words: Vec<String>,
}

#[derive(Deserialize)]
struct LexiconLine {
    word: String,
    #[serde(flatten)]
    entry: LexiconEntry,
}

/// Word → synonyms, words of connected synsets, and gloss words.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, LexiconEntry>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: &str, entry: LexiconEntry) {
        let word = word.trim();
        if !word.is_empty() {
            self.entries.entry(word.to_string()).or_insert(entry);
        }
    }

    /// Reads JSON Lines with keys `word`, `synonyms`, `related`, `gloss_words`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut lex = Self::new();
        for (idx, line) in read(path)?.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: LexiconLine = serde_json::from_str(line)
                .map_err(|e| Error::parse(path, idx + 1, e.to_string()))?;
            if rec.word.trim().is_empty() {
                return Err(Error::parse(path, idx + 1, "empty `word`"));
            }
            lex.insert(&rec.word, rec.entry);
        }
        Ok(lex)
    }

    pub fn get(&self, word: &str) -> Option<&LexiconEntry> {
        find_entry(&self.entries, word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Max similarity between `att` and `term` expanded by its lexicon entry.
pub fn lexicon_max_similarity(lex: &Lexicon, store: &EmbeddingStore, term: &str, att: &str) -> f64 {
    let own = store.sqrt_cosine(att, term);
    match lex.get(term) {
        Some(e) => {
            let expanded = e
                .synonyms
                .iter()
                .chain(&e.related)
                .chain(&e.gloss_words)
                .map(String::as_str);
            own.max(max_similarity(store, att, expanded))
        }
        None => own,
    }
}

#[derive(Debug, Clone, Default)]
pub struct NgramCounts {
    unigrams: HashMap<String, u64>,
    bigrams: HashMap<(String, String), u64>,
}

impl NgramCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_unigram(&mut self, token: &str, count: u64) {
        self.unigrams.insert(token.to_string(), count);
    }

    pub fn set_bigram(&mut self, first: &str, second: &str, count: u64) {
        self.bigrams
            .insert((first.to_string(), second.to_string()), count);
    }

    /// Loads `token<TAB>count` unigrams and `token1 token2<TAB>count` bigrams.
    pub fn load(unigram_path: impl AsRef<Path>, bigram_path: impl AsRef<Path>) -> Result<Self> {
        let mut counts = Self::new();
        let path = unigram_path.as_ref();
        for (line_no, key, count) in count_lines(path)? {
            if key.split_whitespace().count() != 1 {
                return Err(Error::parse(
                    path,
                    line_no,
                    "unigram key must be a single token",
                ));
            }
            counts.unigrams.entry(key).or_insert(count);
        }
        let path = bigram_path.as_ref();
        for (line_no, key, count) in count_lines(path)? {
            let (a, b) = key
                .split_once(' ')
                .filter(|(a, b)| !a.is_empty() && !b.is_empty() && !b.contains(' '))
                .ok_or_else(|| Error::parse(path, line_no, "bigram key must be `token1 token2`"))?;
            counts
                .bigrams
                .entry((a.to_string(), b.to_string()))
                .or_insert(count);
        }
        Ok(counts)
    }

    fn lookup<K, F>(term: &str, get: F) -> u64
    where
        F: Fn(&str) -> Option<K>,
        K: Into<u64>,
    {
        let t = term.trim();
        get(t)
            .or_else(|| get(&t.to_lowercase()))
            .map(Into::into)
            .unwrap_or(0)
    }

    /// Count of `token`; exact spelling first, then lowercase. Missing is 0.
    pub fn unigram(&self, token: &str) -> u64 {
        Self::lookup(token, |t| self.unigrams.get(t).copied())
    }

    /// Count of the ordered pair `(first, second)`.
    pub fn bigram(&self, first: &str, second: &str) -> u64 {
        let get = |a: &str, b: &str| self.bigrams.get(&(a.to_string(), b.to_string())).copied();
        let (a, b) = (first.trim(), second.trim());
        get(a, b)
            .or_else(|| get(&a.to_lowercase(), &b.to_lowercase()))
            .unwrap_or(0)
    }
}

fn count_lines(path: &Path) -> Result<Vec<(usize, String, u64)>> {
    let mut out = Vec::new();
    for (idx, line) in read(path)?.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (key, count) = line
            .rsplit_once('\t')
            .ok_or_else(|| Error::parse(path, idx + 1, "expected `key<TAB>count`"))?;
        let count: u64 = count
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, idx + 1, format!("bad count `{count}`")))?;
        out.push((idx + 1, key.trim().to_string(), count));
    }
    Ok(out)
}

/// Smoothed log-likelihood significance of the phrase `term att`:
///
/// `10 + log10(#(term, att) + 1) - log10((#term + 1e5) * (#att + 1e5))`
pub fn significance(bigram: u64, term_count: u64, att_count: u64) -> f64 {
    10.0 + (bigram as f64 + 1.0).log10()
        - ((term_count as f64 + 1e5) * (att_count as f64 + 1e5)).log10()
}

pub fn ngram_significance(counts: &NgramCounts, term: &str, att: &str) -> f64 {
    significance(
        counts.bigram(term, att),
        counts.unigram(term),
        counts.unigram(att),
    )
}
