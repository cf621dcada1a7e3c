//! Whole-word, case-insensitive lexicon matching over corpus text.
//!
//! Text and term surfaces are both split on default Unicode word boundaries
//! and compared token by token after case folding. A multi-word term matches
//! any run of consecutive word tokens with the same folded sequence, whatever
//! whitespace or punctuation separates them.

use std::collections::BTreeSet;

use serde_json::json;

use crate::corpus::Example;
use crate::lexicon::{Lexicon, LexiconTerm, TermId, TermType, TypeSet};
use crate::text::{fold, word_tokens};

#[derive(Debug, Clone, PartialEq)]
pub struct TermMatch<'a> {
    pub term_id: TermId,
    pub term: &'a LexiconTerm,
    /// Start offset in Unicode scalar values, inclusive.
    pub start: usize,
    /// End offset in Unicode scalar values, exclusive.
    pub end: usize,
    pub matched_text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport<'a> {
    pub example_id: String,
    pub matches: Vec<TermMatch<'a>>,
    pub has_slur: bool,
    pub has_target: bool,
    pub has_neutral: bool,
}

impl<'a> MatchReport<'a> {
    fn new(example_id: &str, matches: Vec<TermMatch<'a>>) -> Self {
        let types = matches.iter().fold(TypeSet::EMPTY, |acc, m| acc.union(m.term.types));
        MatchReport {
            example_id: example_id.to_string(),
            has_slur: types.contains(TermType::Slur),
            has_target: types.contains(TermType::Target),
            has_neutral: types.contains(TermType::Neutral),
            matches,
        }
    }

    /// True if the document contains a slur or a target group term.
    pub fn bears_slur_or_target(&self) -> bool {
        self.has_slur || self.has_target
    }

    /// Distinct matched surfaces, sorted.
    pub fn matched_surfaces(&self) -> Vec<String> {
        self.matches
            .iter()
            .map(|m| m.term.surface.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let matches: Vec<_> = self
            .matches
            .iter()
            .map(|m| {
                json!({
                    "term": m.term.surface,
                    "types": m.term.types,
                    "start": m.start,
                    "end": m.end,
                })
            })
            .collect();
        json!({
            "id": self.example_id,
            "matches": matches,
            "has_slur": self.has_slur,
            "has_target": self.has_target,
            "has_neutral": self.has_neutral,
        })
    }
}

/// Finds every whole-word occurrence of a lexicon surface in `text`.
///
/// With `languages` set, only terms of those languages are considered.
/// Overlapping matches are all kept. Output is ordered by start offset, then
/// surface, then end offset.
pub fn find_terms<'a>(text: &str, lexicon: &'a Lexicon, languages: Option<&BTreeSet<String>>) -> Vec<TermMatch<'a>> {
    let tokens = word_tokens(text);
    let folded: Vec<String> = tokens.iter().map(|t| fold(t.text)).collect();
    let max_len = lexicon.max_tokens();
    let in_scope = |lang: &str, _: &str| languages.is_none_or(|set| set.contains(lang));

    let mut out = Vec::new();
    for i in 0..tokens.len() {
        let mut key = String::new();
        for len in 1..=max_len.min(tokens.len() - i) {
            let last = i + len - 1;
            if len > 1 {
                key.push(' ');
            }
            key.push_str(&folded[last]);
            for id in lexicon.lookup_key(&key, in_scope) {
                out.push(TermMatch {
                    term_id: id,
                    term: lexicon.term(id),
                    start: tokens[i].char_start,
                    end: tokens[last].char_end,
                    matched_text: text[tokens[i].byte_start..tokens[last].byte_end].to_string(),
                });
            }
        }
    }
    out.sort_by(|a, b| (a.start, &a.term.surface, a.end, a.term_id).cmp(&(b.start, &b.term.surface, b.end, b.term_id)));
    out
}

/// The default language scope for an example: every language of every
/// country that has terms in the example's language. `None` (no restriction)
/// when the lexicon has no term in that language.
pub fn default_scope(lexicon: &Lexicon, language: &str) -> Option<BTreeSet<String>> {
    let langs = lexicon.sibling_languages(language);
    (!langs.is_empty()).then_some(langs)
}

/// Which lexicon terms a document is matched against.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum MatchScope {
    /// Per document, see [`default_scope`].
    #[default]
    CountryOfLanguage,
    /// Only terms in these languages.
    Languages(BTreeSet<String>),
    /// Every term.
    All,
}

impl MatchScope {
    pub fn classify<'a>(&self, example: &Example, lexicon: &'a Lexicon) -> MatchReport<'a> {
        match self {
            MatchScope::CountryOfLanguage => classify_example(example, lexicon),
            MatchScope::Languages(langs) => classify_example_in(example, lexicon, Some(langs)),
            MatchScope::All => classify_example_in(example, lexicon, None),
        }
    }
}

/// Matches an example against the lexicon using [`default_scope`].
pub fn classify_example<'a>(example: &Example, lexicon: &'a Lexicon) -> MatchReport<'a> {
    let scope = default_scope(lexicon, &example.language);
    classify_example_in(example, lexicon, scope.as_ref())
}

/// Matches an example against an explicit language scope (`None` = all terms).
pub fn classify_example_in<'a>(
    example: &Example,
    lexicon: &'a Lexicon,
    languages: Option<&BTreeSet<String>>,
) -> MatchReport<'a> {
    MatchReport::new(&example.id, find_terms(&example.text, lexicon, languages))
}
