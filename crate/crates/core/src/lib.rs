//! Lexicon-driven tooling for multilingual hate speech data: lexicon loading
//! and statistics, whole-word term matching, seeded few-shot shot selection,
//! keyword-list annotation, representation-shift analysis and classification
//! metrics.

pub mod corpus;
pub mod embedding;
pub mod interp;
pub mod lexicon;
pub mod matching;
pub mod metrics;
pub mod report;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod text;

pub use corpus::{parse_corpus, Example, Label};
pub use embedding::EmbeddingTable;
pub use interp::{annotate_words, cosine, shift_report, word_vector, AnnotatedWordList, ShiftMetric, ShiftReport};
pub use lexicon::{Lexicon, LexiconError, LexiconTerm, TermType, TypeSet};
pub use matching::{classify_example, find_terms, MatchReport, MatchScope, TermMatch};
pub use metrics::{aggregate_seeds, macro_scores, score_shot_set, MetricSummary, PredictionRecord, StdKind};
pub use sampler::{
    complement, distribution_report, sample_lexicon_first, sample_random, ComplementConfig, ComplementMode,
    DistributionReport, Method, Origin, SamplingConfig, ShotSet,
};
pub use stats::{compute_stats, validate_against_declared, Discrepancy, LexiconStats};
