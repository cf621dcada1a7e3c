//! Lexicon data model and the TSV lexicon format.
//!
//! A lexicon file holds one term per line:
//!
//! ```text
//! surface<TAB>country<TAB>language<TAB>types<TAB>description
//! ```
//!
//! `types` is a `|`-joined list drawn from `Neutral`, `Target` and `Slur`.
//! Lines starting with `#` and blank lines are skipped. There is no header.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{fold, match_key, nfc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TermType {
    Neutral,
    Target,
    Slur,
}

impl TermType {
    pub const ALL: [TermType; 3] = [TermType::Neutral, TermType::Target, TermType::Slur];

    fn bit(self) -> u8 {
        match self {
            TermType::Neutral => 1,
            TermType::Target => 2,
            TermType::Slur => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TermType::Neutral => "Neutral",
            TermType::Target => "Target",
            TermType::Slur => "Slur",
        }
    }
}

impl fmt::Display for TermType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TermType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TermType::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| s.trim().to_string())
    }
}

/// A set of [`TermType`]s, stored as a bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeSet(u8);

impl TypeSet {
    pub const EMPTY: TypeSet = TypeSet(0);

    pub fn single(t: TermType) -> Self {
        TypeSet(t.bit())
    }

    pub fn insert(&mut self, t: TermType) {
        self.0 |= t.bit();
    }

    pub fn contains(self, t: TermType) -> bool {
        self.0 & t.bit() != 0
    }

    pub fn union(self, other: TypeSet) -> TypeSet {
        TypeSet(self.0 | other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_slur(self) -> bool {
        self.contains(TermType::Slur)
    }

    pub fn is_target(self) -> bool {
        self.contains(TermType::Target)
    }

    pub fn iter(self) -> impl Iterator<Item = TermType> {
        TermType::ALL.into_iter().filter(move |t| self.contains(*t))
    }

    /// Parses a `|`-joined label list such as `Target|Slur`.
    pub fn parse_labels(s: &str) -> Result<TypeSet, TypeSetError> {
        let mut set = TypeSet::EMPTY;
        for label in s.split('|') {
            if label.trim().is_empty() {
                continue;
            }
            let t = label.parse::<TermType>().map_err(TypeSetError::Unknown)?;
            set.insert(t);
        }
        if set.is_empty() {
            return Err(TypeSetError::Empty);
        }
        Ok(set)
    }
}

impl FromIterator<TermType> for TypeSet {
    fn from_iter<I: IntoIterator<Item = TermType>>(iter: I) -> Self {
        let mut set = TypeSet::EMPTY;
        for t in iter {
            set.insert(t);
        }
        set
    }
}

impl fmt::Display for TypeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<_> = self.iter().map(TermType::as_str).collect();
        f.write_str(&labels.join("|"))
    }
}

impl fmt::Debug for TypeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TypeSet({self})")
    }
}

impl Serialize for TypeSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for TypeSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let types = Vec::<TermType>::deserialize(deserializer)?;
        Ok(types.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeSetError {
    #[error("unknown type label {0:?} (expected Neutral, Target or Slur)")]
    Unknown(String),
    #[error("empty type set")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LexiconTerm {
    pub surface: String,
    pub country: String,
    pub language: String,
    pub types: TypeSet,
    pub description: String,
}

impl LexiconTerm {
    pub fn new(
        surface: &str,
        country: &str,
        language: &str,
        types: TypeSet,
        description: &str,
    ) -> Result<Self, LexiconError> {
        let surface = nfc(surface.trim());
        if surface.is_empty() {
            return Err(LexiconError::EmptySurface { line: 0 });
        }
        if types.is_empty() {
            return Err(LexiconError::EmptyTypes { line: 0 });
        }
        Ok(LexiconTerm {
            surface,
            country: country.trim().to_string(),
            language: language.trim().to_string(),
            types,
            description: nfc(description.trim()),
        })
    }

    fn identity(&self) -> (String, &str, &str) {
        (fold(&self.surface), &self.country, &self.language)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("line {line}: expected 5 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: empty surface")]
    EmptySurface { line: usize },
    #[error("line {line}: empty {column}")]
    EmptyField { line: usize, column: &'static str },
    #[error("line {line}: unknown type label {label:?}")]
    UnknownType { line: usize, label: String },
    #[error("line {line}: empty type set")]
    EmptyTypes { line: usize },
    #[error("line {line}: duplicate term {surface:?} ({country}, {language}), first defined on line {first}")]
    Duplicate {
        line: usize,
        first: usize,
        surface: String,
        country: String,
        language: String,
    },
}

impl LexiconError {
    pub fn line(&self) -> usize {
        match self {
            LexiconError::ColumnCount { line, .. }
            | LexiconError::EmptySurface { line }
            | LexiconError::EmptyField { line, .. }
            | LexiconError::UnknownType { line, .. }
            | LexiconError::EmptyTypes { line }
            | LexiconError::Duplicate { line, .. } => *line,
        }
    }
}

/// Index into [`Lexicon::terms`].
pub type TermId = usize;

type Partition = HashMap<String, Vec<TermId>>;

/// An immutable, validated set of terms with a case-folded lookup index.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    terms: Vec<LexiconTerm>,
    /// (language, country) → match key → terms.
    index: HashMap<(String, String), Partition>,
    max_tokens: usize,
}

impl PartialEq for Lexicon {
    /// Two lexicons are equal when they hold the same multiset of terms.
    fn eq(&self, other: &Self) -> bool {
        let mut a: Vec<_> = self.terms.iter().collect();
        let mut b: Vec<_> = other.terms.iter().collect();
        a.sort();
        b.sort();
        a == b
    }
}

impl Lexicon {
    /// Parses lexicon TSV content.
    pub fn parse(source: &str) -> Result<Lexicon, LexiconError> {
        let source = source.strip_prefix('\u{feff}').unwrap_or(source);
        let mut terms = Vec::new();
        let mut lines = Vec::new();
        for (idx, raw) in source.lines().enumerate() {
            let line = idx + 1;
            let raw = raw.strip_suffix('\r').unwrap_or(raw);
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = raw.split('\t').collect();
            if cols.len() != 5 {
                return Err(LexiconError::ColumnCount {
                    line,
                    found: cols.len(),
                });
            }
            if cols[0].trim().is_empty() {
                return Err(LexiconError::EmptySurface { line });
            }
            for (col, name) in [(cols[1], "country"), (cols[2], "language")] {
                if col.trim().is_empty() {
                    return Err(LexiconError::EmptyField { line, column: name });
                }
            }
            let types = TypeSet::parse_labels(cols[3]).map_err(|e| match e {
                TypeSetError::Unknown(label) => LexiconError::UnknownType { line, label },
                TypeSetError::Empty => LexiconError::EmptyTypes { line },
            })?;
            let term = LexiconTerm::new(cols[0], cols[1], cols[2], types, cols[4])?;
            terms.push(term);
            lines.push(line);
        }
        Lexicon::build(terms, Some(&lines))
    }

    /// Builds a lexicon from already-constructed terms.
    pub fn from_terms(terms: Vec<LexiconTerm>) -> Result<Lexicon, LexiconError> {
        Lexicon::build(terms, None)
    }

    fn build(terms: Vec<LexiconTerm>, lines: Option<&[usize]>) -> Result<Lexicon, LexiconError> {
        let line_of = |i: usize| lines.map_or(i + 1, |l| l[i]);
        let mut seen: HashMap<(String, &str, &str), usize> = HashMap::new();
        for (i, term) in terms.iter().enumerate() {
            if term.types.is_empty() {
                return Err(LexiconError::EmptyTypes { line: line_of(i) });
            }
            if let Some(&first) = seen.get(&term.identity()) {
                return Err(LexiconError::Duplicate {
                    line: line_of(i),
                    first: line_of(first),
                    surface: term.surface.clone(),
                    country: term.country.clone(),
                    language: term.language.clone(),
                });
            }
            seen.insert(term.identity(), i);
        }

        let mut index: HashMap<(String, String), Partition> = HashMap::new();
        let mut max_tokens = 0;
        for (id, term) in terms.iter().enumerate() {
            let Some((key, n)) = match_key(&term.surface) else {
                continue;
            };
            max_tokens = max_tokens.max(n);
            index
                .entry((term.language.clone(), term.country.clone()))
                .or_default()
                .entry(key)
                .or_default()
                .push(id);
        }
        Ok(Lexicon {
            terms,
            index,
            max_tokens,
        })
    }

    pub fn terms(&self) -> &[LexiconTerm] {
        &self.terms
    }

    pub fn term(&self, id: TermId) -> &LexiconTerm {
        &self.terms[id]
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Longest term surface, in word tokens.
    pub fn max_tokens(&self) -> usize {
        self.max_tokens
    }

    pub fn countries(&self) -> BTreeSet<&str> {
        self.terms.iter().map(|t| t.country.as_str()).collect()
    }

    pub fn languages(&self) -> BTreeSet<&str> {
        self.terms.iter().map(|t| t.language.as_str()).collect()
    }

    /// Every language used by a country that has at least one term in `language`.
    ///
    /// This is the default matching scope for a document written in
    /// `language`, so that code-switched text (e.g. Hindi with English) sees
    /// its country's whole lexicon.
    pub fn sibling_languages(&self, language: &str) -> BTreeSet<String> {
        let countries: BTreeSet<&str> = self
            .terms
            .iter()
            .filter(|t| t.language == language)
            .map(|t| t.country.as_str())
            .collect();
        self.terms
            .iter()
            .filter(|t| countries.contains(t.country.as_str()))
            .map(|t| t.language.clone())
            .collect()
    }

    /// Terms whose match key equals `key`, restricted by the given predicate
    /// on (language, country). Result is sorted by term id.
    pub fn lookup_key<F>(&self, key: &str, mut scope: F) -> Vec<TermId>
    where
        F: FnMut(&str, &str) -> bool,
    {
        let mut ids: Vec<TermId> = self
            .index
            .iter()
            .filter(|((lang, country), _)| scope(lang, country))
            .filter_map(|(_, part)| part.get(key))
            .flatten()
            .copied()
            .collect();
        ids.sort_unstable();
        ids
    }

    /// Terms whose surface matches `word` case-insensitively, in any scope.
    pub fn lookup(&self, word: &str) -> Vec<TermId> {
        match match_key(word) {
            Some((key, _)) => self.lookup_key(&key, |_, _| true),
            None => Vec::new(),
        }
    }

    /// Serializes back to the TSV format, one line per term, in load order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                t.surface, t.country, t.language, t.types, t.description
            ));
        }
        out
    }
}
