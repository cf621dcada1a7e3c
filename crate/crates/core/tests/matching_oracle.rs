mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::{impl_matches, oracle_lexicon, oracle_matches, random_document, FILLERS, SEPARATORS};
use lexishot::find_terms;
use lexishot::rng::ShotRng;

#[test]
fn seeded_documents_match_oracle() {
    let lex = oracle_lexicon();
    assert_eq!(lex.len(), 50);
    let mut rng = ShotRng::new(2024);
    let mut total_hits = 0;
    for _ in 0..1000 {
        let doc = random_document(&mut rng, &lex);
        let expected = oracle_matches(&doc, &lex, None);
        assert_eq!(impl_matches(&doc, &lex, None), expected, "document {doc:?}");
        total_hits += expected.len();
    }
    // the generator must actually exercise the matcher
    assert!(total_hits > 2000, "{total_hits}");
}

#[test]
fn language_filtered_documents_match_oracle() {
    let lex = oracle_lexicon();
    let mut rng = ShotRng::new(77);
    let filters: Vec<BTreeSet<String>> = vec![
        ["de".to_string()].into(),
        ["hi".to_string(), "en".to_string()].into(),
        ["sw".to_string()].into(),
    ];
    for i in 0..300 {
        let doc = random_document(&mut rng, &lex);
        let f = &filters[i % filters.len()];
        assert_eq!(impl_matches(&doc, &lex, Some(f)), oracle_matches(&doc, &lex, Some(f)));
    }
}

fn piece() -> impl Strategy<Value = String> {
    let lex = oracle_lexicon();
    let surfaces: Vec<String> = lex.terms().iter().map(|t| t.surface.clone()).collect();
    let fillers: Vec<String> = FILLERS.iter().map(|s| s.to_string()).collect();
    (
        prop_oneof![prop::sample::select(surfaces), prop::sample::select(fillers)],
        0..3u8,
    )
        .prop_map(|(p, case)| match case {
            0 => p.to_uppercase(),
            1 => p.to_lowercase(),
            _ => p,
        })
}

fn document() -> impl Strategy<Value = String> {
    prop::collection::vec((piece(), prop::sample::select(SEPARATORS)), 0..20).prop_map(|parts| {
        let mut s = String::new();
        for (i, (p, sep)) in parts.iter().enumerate() {
            if i > 0 {
                s.push_str(sep);
            }
            s.push_str(p);
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn find_terms_equals_oracle(doc in document()) {
        let lex = oracle_lexicon();
        prop_assert_eq!(impl_matches(&doc, &lex, None), oracle_matches(&doc, &lex, None));
    }

    #[test]
    fn find_terms_is_deterministic(doc in document()) {
        let lex = oracle_lexicon();
        prop_assert_eq!(find_terms(&doc, &lex, None), find_terms(&doc, &lex, None));
    }

    #[test]
    fn matches_are_sorted_and_in_bounds(doc in document()) {
        let lex = oracle_lexicon();
        let n = doc.chars().count();
        let m = find_terms(&doc, &lex, None);
        for w in m.windows(2) {
            prop_assert!(w[0].start <= w[1].start);
        }
        for hit in &m {
            prop_assert!(hit.start < hit.end && hit.end <= n);
            let slice: String = doc.chars().skip(hit.start).take(hit.end - hit.start).collect();
            prop_assert_eq!(&slice, &hit.matched_text);
            prop_assert_eq!(
                lexishot::text::match_key(&hit.matched_text).map(|k| k.0),
                lexishot::text::match_key(&hit.term.surface).map(|k| k.0)
            );
        }
    }

    /// Inserting ` surface ` at a space keeps every match that does not
    /// straddle the insertion point and adds the inserted one.
    #[test]
    fn insertion_is_sound(doc in document(), term_idx in 0usize..50, at in 0usize..200) {
        let lex = oracle_lexicon();
        let spaces: Vec<usize> = doc.char_indices().filter(|(_, c)| *c == ' ').map(|(b, _)| b).collect();
        prop_assume!(!spaces.is_empty());
        let byte_at = spaces[at % spaces.len()];
        let char_at = doc[..byte_at].chars().count();
        let surface = &lex.term(term_idx).surface;
        let inserted = format!("{} {} {}", &doc[..byte_at], surface, &doc[byte_at + 1..]);
        let shift = surface.chars().count() + 1;

        let before = impl_matches(&doc, &lex, None);
        let after = impl_matches(&inserted, &lex, None);
        for (s, e, sur, c, l) in before {
            if e <= char_at {
                prop_assert!(after.contains(&(s, e, sur, c, l)));
            } else if s > char_at {
                prop_assert!(after.contains(&(s + shift, e + shift, sur, c, l)));
            }
        }
        let t = lex.term(term_idx);
        let hit = (char_at + 1, char_at + 1 + surface.chars().count(), t.surface.clone(), t.country.clone(), t.language.clone());
        prop_assert!(after.contains(&hit), "{:?} not in {:?}", hit, after);
    }
}
