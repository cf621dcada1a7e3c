//! Keyword-list annotation and representation-shift analysis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::EmbeddingTable;
use crate::lexicon::{Lexicon, TermType, TypeSet};
use crate::rng::ShotRng;
use crate::text::match_key;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InterpError {
    #[error("cannot average an empty list of token vectors")]
    NoTokens,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,
    #[error("cosine similarity is undefined for empty vectors")]
    EmptyVector,
    #[error("zero vector for term {0:?}")]
    ZeroVectorFor(String),
    #[error("terms missing from embedding tables: {}", .0.join(", "))]
    MissingTerms(Vec<String>),
    #[error("term {term:?} appears in groups {first:?} and {second:?}")]
    OverlappingGroups {
        term: String,
        first: String,
        second: String,
    },
    #[error("group {0:?} has no terms")]
    EmptyGroup(String),
    #[error("{requested} baseline words requested but only {available} candidates are available")]
    NotEnoughCandidates { requested: usize, available: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordAnnotation {
    pub word: String,
    /// Union of the types of every matching term, `None` if unmatched.
    pub types: Option<TypeSet>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordListSummary {
    pub slurs: usize,
    pub targets: usize,
    pub both: usize,
    pub neutral: usize,
    pub unmatched: usize,
}

impl WordListSummary {
    pub fn from_entries(entries: &[WordAnnotation]) -> Self {
        let mut s = WordListSummary::default();
        for e in entries {
            match e.types {
                None => s.unmatched += 1,
                Some(t) => {
                    s.slurs += t.is_slur() as usize;
                    s.targets += t.is_target() as usize;
                    s.both += (t.is_slur() && t.is_target()) as usize;
                    s.neutral += t.contains(TermType::Neutral) as usize;
                }
            }
        }
        s
    }
}

impl fmt::Display for WordListSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let plural = |n: usize, word: &str| {
            if n == 1 {
                format!("{n} {word}")
            } else {
                format!("{n} {word}s")
            }
        };
        write!(
            f,
            "{}, {} ({} both, {} neutral, {} unmatched)",
            plural(self.slurs, "slur"),
            plural(self.targets, "target"),
            self.both,
            self.neutral,
            self.unmatched
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedWordList {
    pub country: String,
    pub entries: Vec<WordAnnotation>,
    pub summary: WordListSummary,
}

impl AnnotatedWordList {
    pub fn to_table(&self) -> String {
        let mut rows = vec![vec!["Word".to_string(), "Types".to_string()]];
        for e in &self.entries {
            let types = e.types.map_or_else(|| "-".to_string(), |t| t.to_string());
            rows.push(vec![e.word.clone(), types]);
        }
        let mut out = crate::report::align_columns(&rows);
        out.push_str(&format!("{}: {}\n", self.country, self.summary));
        out
    }
}

/// Looks every word up in the country's part of the lexicon, case-folded.
/// A word counts once toward each category its types imply.
pub fn annotate_words<S: AsRef<str>>(words: &[S], lexicon: &Lexicon, country: &str) -> AnnotatedWordList {
    let entries: Vec<WordAnnotation> = words
        .iter()
        .map(|w| {
            let word = w.as_ref();
            let types = match_key(word).and_then(|(key, _)| {
                let ids = lexicon.lookup_key(&key, |_, c| c == country);
                ids.iter().map(|&id| lexicon.term(id).types).reduce(TypeSet::union)
            });
            WordAnnotation {
                word: word.to_string(),
                types,
            }
        })
        .collect();
    AnnotatedWordList {
        country: country.to_string(),
        summary: WordListSummary::from_entries(&entries),
        entries,
    }
}

/// Component-wise mean of a word's sub-token vectors.
pub fn word_vector<V: AsRef<[f64]>>(token_vectors: &[V]) -> Result<Vec<f64>, InterpError> {
    let first = token_vectors.first().ok_or(InterpError::NoTokens)?.as_ref();
    let dim = first.len();
    let mut sum = vec![0.0; dim];
    for v in token_vectors {
        let v = v.as_ref();
        if v.len() != dim {
            return Err(InterpError::DimensionMismatch(dim, v.len()));
        }
        for (acc, x) in sum.iter_mut().zip(v) {
            *acc += x;
        }
    }
    let n = token_vectors.len() as f64;
    Ok(sum.into_iter().map(|x| x / n).collect())
}

pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64, InterpError> {
    if u.len() != v.len() {
        return Err(InterpError::DimensionMismatch(u.len(), v.len()));
    }
    if u.is_empty() {
        return Err(InterpError::EmptyVector);
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(InterpError::ZeroVector);
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftMetric {
    /// Cosine similarity.
    #[default]
    Cosine,
    /// 1 − cosine similarity.
    Distance,
}

impl ShiftMetric {
    fn apply(self, u: &[f64], v: &[f64]) -> Result<f64, InterpError> {
        let c = cosine(u, v)?;
        Ok(match self {
            ShiftMetric::Cosine => c,
            ShiftMetric::Distance => 1.0 - c,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermShift {
    pub term: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupShift {
    pub group: String,
    pub mean: f64,
    pub terms: Vec<TermShift>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub metric: ShiftMetric,
    pub groups: Vec<GroupShift>,
}

impl ShiftReport {
    pub fn group(&self, name: &str) -> Option<&GroupShift> {
        self.groups.iter().find(|g| g.group == name)
    }

    pub fn to_table(&self) -> String {
        let mut rows = vec![vec![
            "Group".to_string(),
            "Terms".to_string(),
            match self.metric {
                ShiftMetric::Cosine => "Mean cosine",
                ShiftMetric::Distance => "Mean distance",
            }
            .to_string(),
        ]];
        for g in &self.groups {
            rows.push(vec![
                g.group.clone(),
                g.terms.len().to_string(),
                format!("{:.4}", g.mean),
            ]);
        }
        crate::report::align_columns(&rows)
    }
}

/// Per-term similarity between the `before` and `after` vectors of every
/// grouped term, with per-group arithmetic means. Groups and terms come out
/// sorted by name; duplicate terms within a group are merged.
pub fn shift_report(
    before: &EmbeddingTable,
    after: &EmbeddingTable,
    groups: &BTreeMap<String, Vec<String>>,
    metric: ShiftMetric,
) -> Result<ShiftReport, InterpError> {
    if before.dimension() != after.dimension() {
        return Err(InterpError::DimensionMismatch(before.dimension(), after.dimension()));
    }
    let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
    let mut missing = BTreeSet::new();
    for (group, terms) in groups {
        if terms.is_empty() {
            return Err(InterpError::EmptyGroup(group.clone()));
        }
        for term in terms {
            if let Some(first) = owner.insert(term, group) {
                if first != group {
                    return Err(InterpError::OverlappingGroups {
                        term: term.clone(),
                        first: first.to_string(),
                        second: group.clone(),
                    });
                }
            }
            if before.get(term).is_none() {
                missing.insert(format!("{term} (before)"));
            }
            if after.get(term).is_none() {
                missing.insert(format!("{term} (after)"));
            }
        }
    }
    if !missing.is_empty() {
        return Err(InterpError::MissingTerms(missing.into_iter().collect()));
    }

    let mut out = Vec::with_capacity(groups.len());
    for (group, terms) in groups {
        let unique: Vec<&String> = terms.iter().collect::<BTreeSet<_>>().into_iter().collect();
        let shifts = unique
            .par_iter()
            .map(|&term| {
                let (b, a) = (before.get(term).unwrap(), after.get(term).unwrap());
                metric
                    .apply(b, a)
                    .map(|value| TermShift {
                        term: term.clone(),
                        value,
                    })
                    .map_err(|_| InterpError::ZeroVectorFor(term.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mean = shifts.iter().map(|s| s.value).sum::<f64>() / shifts.len() as f64;
        out.push(GroupShift {
            group: group.clone(),
            mean,
            terms: shifts,
        });
    }
    Ok(ShiftReport { metric, groups: out })
}

/// Draws `count` baseline words from `candidates` minus `exclude`, using the
/// same seeded selection as shot sampling. Candidates are deduplicated and
/// sorted first; the result is sorted.
pub fn sample_baseline_words(
    candidates: &[String],
    exclude: &BTreeSet<String>,
    count: usize,
    seed: u64,
) -> Result<Vec<String>, InterpError> {
    let pool: Vec<&String> = candidates
        .iter()
        .filter(|c| !exclude.contains(*c))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if pool.len() < count {
        return Err(InterpError::NotEnoughCandidates {
            requested: count,
            available: pool.len(),
        });
    }
    let mut rng = ShotRng::new(seed);
    let mut picked: Vec<String> = rng.choose(&pool, count).into_iter().map(|s| s.to_string()).collect();
    picked.sort();
    Ok(picked)
}

/// Bundled stopword list for a language code (`de`, `en`, `hi`, `pt-BR`,
/// `sw`), or `None` when none ships.
pub fn builtin_stopwords(language: &str) -> Option<Vec<&'static str>> {
    let src = match language {
        "de" => include_str!("../data/stopwords/de.txt"),
        "en" => include_str!("../data/stopwords/en.txt"),
        "hi" => include_str!("../data/stopwords/hi.txt"),
        "pt-BR" | "pt" => include_str!("../data/stopwords/pt-BR.txt"),
        "sw" => include_str!("../data/stopwords/sw.txt"),
        _ => return None,
    };
    Some(
        src.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect(),
    )
}
