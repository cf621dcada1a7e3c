//! Per-country term counts by type combination.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::lexicon::{Lexicon, TermType, TypeSet};

/// Counts for one country. Combinations outside the six named buckets
/// (currently only Neutral/Target/Slur) land in `other`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinationCounts {
    pub neutral: usize,
    pub target: usize,
    pub slur: usize,
    pub neutral_target: usize,
    pub neutral_slur: usize,
    pub target_slur: usize,
    pub other: usize,
}

impl CombinationCounts {
    pub const ROW_LABELS: [&'static str; 7] = [
        "Neutral",
        "Target",
        "Slur",
        "Neutral/Target",
        "Neutral/Slur",
        "Target/Slur",
        "Other",
    ];

    fn bucket_mut(&mut self, types: TypeSet) -> &mut usize {
        use TermType::*;
        let has = |t| types.contains(t);
        match (has(Neutral), has(Target), has(Slur)) {
            (true, false, false) => &mut self.neutral,
            (false, true, false) => &mut self.target,
            (false, false, true) => &mut self.slur,
            (true, true, false) => &mut self.neutral_target,
            (true, false, true) => &mut self.neutral_slur,
            (false, true, true) => &mut self.target_slur,
            _ => &mut self.other,
        }
    }

    pub fn as_row(&self) -> [usize; 7] {
        [
            self.neutral,
            self.target,
            self.slur,
            self.neutral_target,
            self.neutral_slur,
            self.target_slur,
            self.other,
        ]
    }

    pub fn total(&self) -> usize {
        self.as_row().iter().sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconStats {
    pub countries: BTreeMap<String, CombinationCounts>,
}

impl LexiconStats {
    pub fn country(&self, name: &str) -> CombinationCounts {
        self.countries.get(name).copied().unwrap_or_default()
    }

    pub fn total(&self) -> usize {
        self.countries.values().map(CombinationCounts::total).sum()
    }

    /// Renders the counts with one row per combination and one column per
    /// country, followed by a total row.
    pub fn to_table(&self) -> String {
        let names: Vec<&String> = self.countries.keys().collect();
        let mut rows: Vec<Vec<String>> = Vec::new();
        let mut header = vec!["Type".to_string()];
        header.extend(names.iter().map(|s| s.to_string()));
        rows.push(header);
        for (i, label) in CombinationCounts::ROW_LABELS.iter().enumerate() {
            let mut row = vec![label.to_string()];
            row.extend(self.countries.values().map(|c| c.as_row()[i].to_string()));
            rows.push(row);
        }
        let mut total = vec!["Total".to_string()];
        total.extend(self.countries.values().map(|c| c.total().to_string()));
        rows.push(total);
        crate::report::align_columns(&rows)
    }
}

pub fn compute_stats(lexicon: &Lexicon) -> LexiconStats {
    let mut stats = LexiconStats::default();
    for term in lexicon.terms() {
        let counts = stats.countries.entry(term.country.clone()).or_default();
        *counts.bucket_mut(term.types) += 1;
    }
    stats
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub country: String,
    pub computed: usize,
    pub declared: usize,
}

/// Compares computed per-country totals with declared ones. Countries that
/// are declared but absent from the lexicon count as zero; countries without
/// a declared total are not checked.
pub fn validate_against_declared(stats: &LexiconStats, declared: &BTreeMap<String, usize>) -> Vec<Discrepancy> {
    declared
        .iter()
        .filter_map(|(country, &declared)| {
            let computed = stats.country(country).total();
            (computed != declared).then(|| Discrepancy {
                country: country.clone(),
                computed,
                declared,
            })
        })
        .collect()
}
