//! Binary model artifact.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic        4 bytes  "SMEM"
//! version      1 byte   1
//! term_dim     u32
//! rel_dim      u32      always 10
//! n_terms      u32
//! n_relations  u32
//! terms        n_terms     × (u32 byte length, UTF-8 bytes)
//! relations    n_relations × (u32 byte length, UTF-8 bytes)
//! term_emb     n_terms × term_dim f64, row-major
//! rel_emb      n_relations × rel_dim f64, row-major
//! tensor       term_dim × term_dim × rel_dim f64, index (i*term_dim + j)*rel_dim + k
//! bias         n_relations f64
//! ```

use std::fs;
use std::path::Path;

use super::model::{SmeModel, REL_DIM};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SMEM";
pub const VERSION: u8 = 1;

pub fn to_bytes(model: &SmeModel) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    for n in [
        model.term_dim(),
        REL_DIM,
        model.terms().len(),
        model.relations().len(),
    ] {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    for s in model.terms().iter().chain(model.relations()) {
        out.extend_from_slice(&(s.len() as u32).to_le_bytes());
        out.extend_from_slice(s.as_bytes());
    }
    let params = [
        model.term_embeddings_flat(),
        model.relation_embeddings_flat(),
        model.tensor(),
        model.bias(),
    ];
    for block in params {
        for v in block {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Artifact(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }

    fn string(&mut self) -> Result<String> {
        let n = self.u32()?;
        String::from_utf8(self.take(n)?.to_vec())
            .map_err(|_| Error::Artifact("invalid UTF-8 in vocabulary".into()))
    }

    fn floats(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = self.take(
            n.checked_mul(8)
                .ok_or_else(|| Error::Artifact("size overflow".into()))?,
        )?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub fn from_bytes(buf: &[u8]) -> Result<SmeModel> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Artifact("bad magic".into()));
    }
    let version = r.take(1)?[0];
    if version != VERSION {
        return Err(Error::Artifact(format!("unsupported version {version}")));
    }
    let term_dim = r.u32()?;
    let rel_dim = r.u32()?;
    if rel_dim != REL_DIM {
        return Err(Error::Artifact(format!(
            "relation dimension {rel_dim} != {REL_DIM}"
        )));
    }
    let n_terms = r.u32()?;
    let n_rel = r.u32()?;
    let terms = (0..n_terms)
        .map(|_| r.string())
        .collect::<Result<Vec<_>>>()?;
    let relations = (0..n_rel).map(|_| r.string()).collect::<Result<Vec<_>>>()?;
    let term_emb = r.floats(n_terms * term_dim)?;
    let rel_emb = r.floats(n_rel * REL_DIM)?;
    let tensor = r.floats(term_dim * term_dim * REL_DIM)?;
    let bias = r.floats(n_rel)?;
    if r.pos != buf.len() {
        return Err(Error::Artifact(format!(
            "{} trailing bytes",
            buf.len() - r.pos
        )));
    }
    SmeModel::from_parts(terms, relations, term_dim, term_emb, rel_emb, tensor, bias)
}

pub fn save(model: &SmeModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_bytes(model)).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<SmeModel> {
    let path = path.as_ref();
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
    from_bytes(&buf)
}
