//! Word-keyed embedding tables and their text format.
//!
//! ```text
//! DIM 3
//! META model bert-base-multilingual-cased
//! META layer 8
//! muslims<TAB>0.1 -0.25 1.5
//! ```

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmbeddingError {
    #[error("line {line}: expected `DIM <d>` header")]
    MissingDim { line: usize },
    #[error("line {line}: invalid dimension {value:?}")]
    BadDim { line: usize, value: String },
    #[error("line {line}: malformed META line")]
    BadMeta { line: usize },
    #[error("line {line}: expected `key<TAB>values`")]
    MissingTab { line: usize },
    #[error("line {line}: key {key:?} has {found} values, expected {expected}")]
    WrongLength {
        line: usize,
        key: String,
        found: usize,
        expected: usize,
    },
    #[error("line {line}: invalid number {value:?}")]
    BadNumber { line: usize, value: String },
    #[error("line {line}: non-finite value in {key:?}")]
    NonFinite { line: usize, key: String },
    #[error("line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
    #[error("vector for {key:?} has length {found}, table dimension is {expected}")]
    Dimension { key: String, found: usize, expected: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    entries: BTreeMap<String, Vec<f64>>,
    pub metadata: BTreeMap<String, String>,
}

impl EmbeddingTable {
    pub fn new(dimension: usize) -> Self {
        assert!(dimension > 0, "embedding dimension must be positive");
        EmbeddingTable {
            dimension,
            entries: BTreeMap::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&[f64]> {
        self.entries.get(key).map(Vec::as_slice)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Inserts or replaces a vector, checking its length and finiteness.
    pub fn insert(&mut self, key: impl Into<String>, vector: Vec<f64>) -> Result<(), EmbeddingError> {
        let key = key.into();
        if vector.len() != self.dimension {
            return Err(EmbeddingError::Dimension {
                key,
                found: vector.len(),
                expected: self.dimension,
            });
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(EmbeddingError::NonFinite { line: 0, key });
        }
        self.entries.insert(key, vector);
        Ok(())
    }

    pub fn parse(source: &str) -> Result<EmbeddingTable, EmbeddingError> {
        let mut lines = source
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty());

        let (line, first) = lines.next().ok_or(EmbeddingError::MissingDim { line: 1 })?;
        let value = first
            .strip_prefix("DIM ")
            .ok_or(EmbeddingError::MissingDim { line })?
            .trim();
        let dimension = value
            .parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| EmbeddingError::BadDim {
                line,
                value: value.to_string(),
            })?;
        let mut table = EmbeddingTable::new(dimension);

        for (line, raw) in lines {
            if let Some(meta) = raw.strip_prefix("META ") {
                let (k, v) = meta
                    .trim()
                    .split_once(char::is_whitespace)
                    .ok_or(EmbeddingError::BadMeta { line })?;
                table.metadata.insert(k.to_string(), v.trim().to_string());
                continue;
            }
            let (key, values) = raw.split_once('\t').ok_or(EmbeddingError::MissingTab { line })?;
            let vector = values
                .split_whitespace()
                .map(|v| {
                    v.parse::<f64>().map_err(|_| EmbeddingError::BadNumber {
                        line,
                        value: v.to_string(),
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            if vector.len() != dimension {
                return Err(EmbeddingError::WrongLength {
                    line,
                    key: key.to_string(),
                    found: vector.len(),
                    expected: dimension,
                });
            }
            if vector.iter().any(|v| !v.is_finite()) {
                return Err(EmbeddingError::NonFinite {
                    line,
                    key: key.to_string(),
                });
            }
            if table.entries.insert(key.to_string(), vector).is_some() {
                return Err(EmbeddingError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
        }
        Ok(table)
    }

    /// Serializes with shortest round-trip float formatting.
    pub fn to_text(&self) -> String {
        let mut out = format!("DIM {}\n", self.dimension);
        for (k, v) in &self.metadata {
            out.push_str(&format!("META {k} {v}\n"));
        }
        for (key, vector) in &self.entries {
            let values: Vec<String> = vector.iter().map(|x| format!("{x:?}")).collect();
            out.push_str(&format!("{key}\t{}\n", values.join(" ")));
        }
        out
    }
}
