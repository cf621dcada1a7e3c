//! Corpus examples and the corpus TSV format (`id<TAB>label<TAB>language<TAB>text`).

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Binary hate/offensive label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "HOF")]
    Hateful,
    #[serde(rename = "NOT")]
    Neutral,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Hateful => "HOF",
            Label::Neutral => "NOT",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "HOF" => Ok(Label::Hateful),
            "NOT" => Ok(Label::Neutral),
            other => Err(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Example {
    pub id: String,
    pub label: Label,
    pub language: String,
    pub text: String,
}

impl Example {
    pub fn new(id: impl Into<String>, label: Label, language: impl Into<String>, text: impl Into<String>) -> Self {
        Example {
            id: id.into(),
            label,
            language: language.into(),
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("line {line}: expected 4 tab-separated columns (id, label, language, text), found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: empty id")]
    EmptyId { line: usize },
    #[error("line {line}: unknown label {label:?} (expected HOF or NOT)")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { line: usize, id: String },
}

/// Parses corpus TSV. The text column is everything after the third tab.
/// A first line of exactly `id\tlabel\tlanguage\ttext` is treated as a header.
pub fn parse_corpus(source: &str) -> Result<Vec<Example>, CorpusError> {
    let source = source.strip_prefix('\u{feff}').unwrap_or(source);
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        if line == 1 && raw == "id\tlabel\tlanguage\ttext" {
            continue;
        }
        let cols: Vec<&str> = raw.splitn(4, '\t').collect();
        if cols.len() != 4 {
            return Err(CorpusError::ColumnCount {
                line,
                found: cols.len(),
            });
        }
        let id = cols[0].trim();
        if id.is_empty() {
            return Err(CorpusError::EmptyId { line });
        }
        let label = cols[1]
            .parse::<Label>()
            .map_err(|label| CorpusError::UnknownLabel { line, label })?;
        if !ids.insert(id.to_string()) {
            return Err(CorpusError::DuplicateId {
                line,
                id: id.to_string(),
            });
        }
        out.push(Example::new(id, label, cols[2].trim(), cols[3]));
    }
    Ok(out)
}

/// Writes examples back as corpus TSV (no header).
pub fn write_corpus(examples: &[Example]) -> String {
    examples
        .iter()
        .map(|e| format!("{}\t{}\t{}\t{}\n", e.id, e.label, e.language, e.text))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rows_and_header() {
        let src = "id\tlabel\tlanguage\ttext\n1\tHOF\tde\tDie Flüchtling\tDebatte\n2\tNOT\tde\t\n";
        let ex = parse_corpus(src).unwrap();
        assert_eq!(ex.len(), 2);
        assert_eq!(ex[0].text, "Die Flüchtling\tDebatte");
        assert_eq!(ex[1].label, Label::Neutral);
        assert_eq!(parse_corpus(&write_corpus(&ex)).unwrap(), ex);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(
            parse_corpus("1\tHOF\tde\n").unwrap_err(),
            CorpusError::ColumnCount { line: 1, found: 3 }
        );
        assert_eq!(
            parse_corpus("1\tHOF\tde\tx\n2\tOFF\tde\ty\n").unwrap_err(),
            CorpusError::UnknownLabel {
                line: 2,
                label: "OFF".into()
            }
        );
        assert_eq!(
            parse_corpus("1\tHOF\tde\tx\n1\tNOT\tde\ty\n").unwrap_err(),
            CorpusError::DuplicateId {
                line: 2,
                id: "1".into()
            }
        );
    }
}
