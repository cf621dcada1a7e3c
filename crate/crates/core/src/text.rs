//! Unicode helpers shared by lexicon indexing and corpus matching.
//!
//! Every comparison in the crate goes through [`fold`]: NFC, full Unicode
//! case folding, NFC again. Diacritics are preserved.

use caseless::default_case_fold_str;
use unicode_normalization::UnicodeNormalization;
use unicode_segmentation::UnicodeSegmentation;

/// NFC-normalizes `s`.
pub fn nfc(s: &str) -> String {
    s.nfc().collect()
}

/// Case-folds `s` for comparison purposes.
pub fn fold(s: &str) -> String {
    let folded = default_case_fold_str(&nfc(s));
    nfc(&folded)
}

/// A word segment of a text, located both in bytes and in Unicode scalar values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub byte_start: usize,
    pub byte_end: usize,
    pub char_start: usize,
    pub char_end: usize,
}

/// Splits `text` on default Unicode word boundaries and keeps the segments
/// that contain at least one alphanumeric character.
pub fn word_tokens(text: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut chars_seen = 0;
    let mut bytes_seen = 0;
    for (byte_start, segment) in text.split_word_bound_indices() {
        // advance the char counter over whatever lies between segments (nothing, in practice)
        chars_seen += text[bytes_seen..byte_start].chars().count();
        let len = segment.chars().count();
        if segment.chars().any(char::is_alphanumeric) {
            tokens.push(Token {
                text: segment,
                byte_start,
                byte_end: byte_start + segment.len(),
                char_start: chars_seen,
                char_end: chars_seen + len,
            });
        }
        chars_seen += len;
        bytes_seen = byte_start + segment.len();
    }
    tokens
}

/// The folded token sequence of a term surface or a single word, joined by
/// one space. Two strings match as whole words iff their keys are equal.
///
/// Returns `None` when the string has no word tokens at all.
pub fn match_key(s: &str) -> Option<(String, usize)> {
    let tokens = word_tokens(s);
    if tokens.is_empty() {
        return None;
    }
    let key = tokens.iter().map(|t| fold(t.text)).collect::<Vec<_>>().join(" ");
    Some((key, tokens.len()))
}
