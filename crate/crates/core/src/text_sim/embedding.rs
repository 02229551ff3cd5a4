//! Word embedding tables in the plain-text `word v1 v2 ... vd` format.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};

use super::tokenize;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dimension: usize,
    table: HashMap<String, Vec<f64>>,
}

impl EmbeddingStore {
    /// Builds a store from `(word, vector)` pairs. Words are lowercased; the
    /// first vector wins when two words collide after lowercasing.
    pub fn new<I, S>(dimension: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: AsRef<str>,
    {
        if dimension == 0 {
            return Err(Error::Domain("embedding dimension must be positive".into()));
        }
        let mut table = HashMap::new();
        for (word, v) in entries {
            if v.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: v.len(),
                });
            }
            table.entry(word.as_ref().to_lowercase()).or_insert(v);
        }
        Ok(EmbeddingStore { dimension, table })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(std::io::BufReader::new(file), &path.display().to_string())
    }

    /// Parses the text format. An optional `count dim` header line is
    /// detected when the first line holds exactly two integers.
    pub fn read(reader: impl BufRead, context: &str) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            context: format!("{context}:{line}"),
            message,
        };
        let mut dimension = None;
        let mut entries = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| parse_err(i + 1, e.to_string()))?;
            let mut fields = line.split_whitespace();
            let Some(word) = fields.next() else { continue };
            let rest: Vec<&str> = fields.collect();
            if i == 0 && rest.len() == 1 && word.parse::<u64>().is_ok() && rest[0].parse::<u64>().is_ok() {
                continue;
            }
            let v = rest
                .iter()
                .map(|x| x.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| parse_err(i + 1, e.to_string()))?;
            match dimension {
                None if v.is_empty() => return Err(parse_err(i + 1, "empty vector".into())),
                None => dimension = Some(v.len()),
                Some(d) if d != v.len() => {
                    return Err(parse_err(
                        i + 1,
                        format!("expected {d} components, got {}", v.len()),
                    ))
                }
                _ => {}
            }
            entries.push((word.to_string(), v));
        }
        let dimension = dimension.ok_or_else(|| parse_err(0, "no vectors".into()))?;
        EmbeddingStore::new(dimension, entries)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.table.get(&word.to_lowercase()).map(Vec::as_slice)
    }
}

pub(crate) fn normalize(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Some(v)
}

/// Unit vector for a term, or `None` when no part of it is known.
///
/// A term found verbatim (spaces as `_`) uses its own vector; otherwise the
/// vectors of its known words are summed.
pub fn embed_term(store: &EmbeddingStore, term: &str) -> Option<Vec<f64>> {
    let phrase = term.trim().to_lowercase().replace(char::is_whitespace, "_");
    if let Some(v) = store.table.get(&phrase) {
        return normalize(v.clone());
    }
    let mut sum = vec![0.0; store.dimension];
    let mut found = false;
    for word in tokenize(term) {
        if let Some(v) = store.table.get(&word) {
            found = true;
            sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
        }
    }
    if found {
        normalize(sum)
    } else {
        None
    }
}
