//! Task instances and their CSV form: `term1,term2,attribute[,label]`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub term1: String,
    pub term2: String,
    pub attribute: String,
    /// `Some(true)` when the attribute discriminates term1 from term2.
    pub label: Option<bool>,
}

impl Triple {
    pub fn new(term1: &str, term2: &str, attribute: &str) -> Self {
        Self {
            term1: term1.to_string(),
            term2: term2.to_string(),
            attribute: attribute.to_string(),
            label: None,
        }
    }

    pub fn labeled(term1: &str, term2: &str, attribute: &str, label: bool) -> Self {
        Self {
            label: Some(label),
            ..Self::new(term1, term2, attribute)
        }
    }

    /// The same instance with the two terms exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            term1: self.term2.clone(),
            term2: self.term1.clone(),
            ..self.clone()
        }
    }

    pub fn key(&self) -> (&str, &str, &str) {
        (&self.term1, &self.term2, &self.attribute)
    }
}

pub fn parse_triples(text: &str, path: &Path) -> Result<Vec<Triple>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let err = |msg: &str| Error::parse(path, idx + 1, msg);
        if fields.len() != 3 && fields.len() != 4 {
            return Err(err("expected `term1,term2,attribute[,label]`"));
        }
        if fields[..3].iter().any(|f| f.is_empty()) {
            return Err(err("empty term or attribute"));
        }
        let mut t = Triple::new(fields[0], fields[1], fields[2]);
        if let Some(label) = fields.get(3) {
            t.label = Some(match *label {
                "1" => true,
                "0" => false,
                other => return Err(err(&format!("label must be 0 or 1, got `{other}`"))),
            });
        }
        out.push(t);
    }
    Ok(out)
}

pub fn load_triples(path: impl AsRef<Path>) -> Result<Vec<Triple>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_triples(&text, path)
}

/// Labels of every triple, failing on the first unlabeled one.
pub fn labels(triples: &[Triple]) -> Result<Vec<bool>> {
    triples
        .iter()
        .enumerate()
        .map(|(index, t)| t.label.ok_or(Error::MissingLabel { index }))
        .collect()
}
