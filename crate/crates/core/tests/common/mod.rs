//! Independent oracles and generators shared by the property suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use caseless::default_case_fold_str;
use unicode_normalization::UnicodeNormalization;
use unicode_segmentation::UnicodeSegmentation;

use lexishot::rng::ShotRng;
use lexishot::{Lexicon, PredictionRecord};

/// Fifty terms over German, Portuguese, Hindi (Devanagari and romanized),
/// Swahili and English, including phrases, a sharp s and diacritics.
pub const ORACLE_LEXICON: &str = "\
Flüchtling\tGermany\tde\tTarget\t
Roma\tGermany\tde\tTarget\t
Sinti und Roma\tGermany\tde\tTarget\t
Schwule\tGermany\tde\tTarget|Slur\t
Juden\tGermany\tde\tTarget\t
Moslems\tGermany\tde\tTarget\t
Islam\tGermany\tde\tTarget\t
Mohammedaner\tGermany\tde\tTarget|Slur\t
Ausländer\tGermany\tde\tTarget\t
Großmaul\tGermany\tde\tSlur\t
Schwuchteln\tGermany\tde\tSlur\t
Politik\tGermany\tde\tNeutral\t
gorda\tBrazil\tpt-BR\tSlur\t
traveco\tBrazil\tpt-BR\tSlur\t
hora\tBrazil\tpt-BR\tNeutral\t
safada\tBrazil\tpt-BR\tSlur\t
Vagabundo\tBrazil\tpt-BR\tSlur\t
ação\tBrazil\tpt-BR\tNeutral\t
pão de queijo\tBrazil\tpt-BR\tNeutral\t
Ucranizar\tBrazil\tpt-BR\tSlur\t
índio\tBrazil\tpt-BR\tTarget\t
mulheres negras\tBrazil\tpt-BR\tTarget\t
मुसलमान\tIndia\thi\tTarget\t
दलित\tIndia\thi\tTarget\t
ईसाई\tIndia\thi\tTarget\t
सिख\tIndia\thi\tTarget\t
आदिवासी लोग\tIndia\thi\tTarget\t
बंगाली\tIndia\thi\tTarget\t
सरकार\tIndia\thi\tNeutral\t
गाली\tIndia\thi\tSlur\t
कटुआ\tIndia\thi\tSlur\t
mullo\tIndia\thi\tSlur\t
suvar\tIndia\thi\tSlur\t
Bhimte\tIndia\thi\tSlur\t
peaceful\tIndia\ten\tSlur\t
Muslims\tIndia\ten\tTarget\t
Muslim\tIndia\ten\tTarget\t
Rohingyas\tIndia\ten\tTarget\t
quota for women\tIndia\ten\tTarget\t
wakalee\tKenya\tsw\tTarget\t
nugu\tKenya\tsw\tSlur\t
luo\tKenya\tsw\tTarget\t
kikuyu\tKenya\tsw\tTarget\t
tangatanga\tKenya\tsw\tTarget\t
wajinga\tKenya\tsw\tSlur\t
foreskin\tKenya\ten\tSlur\t
madoadoa\tKenya\tsw\tSlur\t
watu wa kuja\tKenya\tsw\tTarget\t
peaceful\tKenya\ten\tNeutral\t
luo\tKenya\ten\tTarget\t
";

pub const FILLERS: &[&str] = &[
    "und",
    "die",
    "horas",
    "Flüchtlinge",
    "Romantik",
    "não",
    "uma",
    "de",
    "यह",
    "है",
    "में",
    "लोग",
    "kwa",
    "na",
    "the",
    "for",
    "women",
    "Sinti",
    "pão",
    "negras",
    "queijo",
    "wa",
    "kuja",
    "2024",
    "STRASSE",
    "acao",
    "Muslimische",
];

pub const SEPARATORS: &[&str] = &[" ", " ", " ", ", ", "  ", " - ", "\n", "! ", "'", "…", " (", ") "];

pub fn oracle_lexicon() -> Lexicon {
    Lexicon::parse(ORACLE_LEXICON).unwrap()
}

fn fold(s: &str) -> String {
    let a: String = s.nfc().collect();
    default_case_fold_str(&a).nfc().collect()
}

/// A random document assembled from lexicon surfaces, fillers and
/// separators, with random case changes.
pub fn random_document(rng: &mut ShotRng, lexicon: &Lexicon) -> String {
    let n = rng.below(25) as usize;
    let mut out = String::new();
    for i in 0..n {
        if i > 0 {
            out.push_str(SEPARATORS[rng.below(SEPARATORS.len() as u64) as usize]);
        }
        let piece = if rng.below(2) == 0 {
            lexicon.term(rng.below(lexicon.len() as u64) as usize).surface.clone()
        } else {
            FILLERS[rng.below(FILLERS.len() as u64) as usize].to_string()
        };
        let piece = match rng.below(4) {
            0 => piece.to_uppercase(),
            1 => piece.to_lowercase(),
            _ => piece,
        };
        out.push_str(&piece);
    }
    out
}

/// (start, end, surface, country, language) for every brute-force match.
pub type OracleHit = (usize, usize, String, String, String);

/// Brute force: every n-gram of word tokens compared against every term.
pub fn oracle_matches(text: &str, lexicon: &Lexicon, languages: Option<&BTreeSet<String>>) -> Vec<OracleHit> {
    let words: Vec<(usize, usize, String)> = text
        .unicode_word_indices()
        .map(|(b, w)| {
            let start = text[..b].chars().count();
            (start, start + w.chars().count(), fold(w))
        })
        .collect();
    let terms: Vec<(Vec<String>, &lexishot::LexiconTerm)> = lexicon
        .terms()
        .iter()
        .filter(|t| languages.is_none_or(|l| l.contains(&t.language)))
        .map(|t| (t.surface.unicode_words().map(fold).collect(), t))
        .collect();
    let mut hits = Vec::new();
    for i in 0..words.len() {
        for (toks, term) in &terms {
            let n = toks.len();
            if n == 0 || i + n > words.len() {
                continue;
            }
            if (0..n).all(|k| words[i + k].2 == toks[k]) {
                hits.push((
                    words[i].0,
                    words[i + n - 1].1,
                    term.surface.clone(),
                    term.country.clone(),
                    term.language.clone(),
                ));
            }
        }
    }
    hits.sort();
    hits
}

pub fn impl_matches(text: &str, lexicon: &Lexicon, languages: Option<&BTreeSet<String>>) -> Vec<OracleHit> {
    let mut hits: Vec<OracleHit> = lexishot::find_terms(text, lexicon, languages)
        .into_iter()
        .map(|m| {
            (
                m.start,
                m.end,
                m.term.surface.clone(),
                m.term.country.clone(),
                m.term.language.clone(),
            )
        })
        .collect();
    hits.sort();
    hits
}

/// Per-class (precision, recall, f1) from an explicit confusion matrix.
#[allow(clippy::needless_range_loop)]
pub fn confusion_oracle(records: &[PredictionRecord], labels: &[&str]) -> (Vec<(f64, f64, f64)>, f64) {
    let k = labels.len();
    let mut m = vec![vec![0u64; k]; k];
    for r in records {
        let g = labels.iter().position(|l| *l == r.gold).unwrap();
        let p = labels.iter().position(|l| *l == r.predicted).unwrap();
        m[g][p] += 1;
    }
    let mut per = Vec::new();
    for c in 0..k {
        let tp = m[c][c] as f64;
        let col: u64 = (0..k).map(|g| m[g][c]).sum();
        let row: u64 = m[c].iter().sum();
        let p = if col == 0 { 0.0 } else { tp / col as f64 };
        let r = if row == 0 { 0.0 } else { tp / row as f64 };
        let f = if tp == 0.0 { 0.0 } else { 2.0 * tp / (col + row) as f64 };
        per.push((p, r, f));
    }
    let macro_f1 = per.iter().map(|x| x.2).sum::<f64>() / k as f64;
    (per, macro_f1)
}
