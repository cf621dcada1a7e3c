//! Shot selection: random baseline, lexicon-first sampling and data
//! complementing, plus slur/target coverage reports.
//!
//! All selection is done over candidates sorted by example id, so results
//! depend only on the seed and the pool's content, never its order. Shot sets
//! are returned sorted by example id.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Example, Label};
use crate::lexicon::{Lexicon, TermId};
use crate::matching::{MatchReport, MatchScope};
use crate::rng::ShotRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Random,
    Lexicon,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Random => "Random",
            Method::Lexicon => "Lexicon",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComplementMode {
    /// Half target-bearing, half slur-bearing examples.
    #[serde(rename = "+l")]
    PlusL,
    /// Unrestricted random examples.
    #[serde(rename = "+r")]
    PlusR,
}

impl fmt::Display for ComplementMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComplementMode::PlusL => "+l",
            ComplementMode::PlusR => "+r",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComplementConfig {
    pub mode: ComplementMode,
    pub size: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub method: Method,
    pub size: usize,
    pub seed: u64,
    pub complement: Option<ComplementConfig>,
}

impl SamplingConfig {
    pub fn new(method: Method, size: usize, seed: u64) -> Self {
        SamplingConfig {
            method,
            size,
            seed,
            complement: None,
        }
    }

    pub fn validate(&self) -> Result<(), SampleError> {
        if self.size == 0 {
            return Err(SampleError::InvalidConfig("size must be at least 1".into()));
        }
        if let Some(c) = &self.complement {
            c.validate()?;
        }
        Ok(())
    }

    /// Short name in the usual notation, e.g. `Lexicon96+l`.
    pub fn set_name(&self) -> String {
        match &self.complement {
            Some(c) => format!("{}{}{}", self.method, self.size, c.mode),
            None => format!("{}{}", self.method, self.size),
        }
    }
}

impl ComplementConfig {
    pub fn validate(&self) -> Result<(), SampleError> {
        if self.size == 0 {
            return Err(SampleError::InvalidConfig("complement size must be at least 1".into()));
        }
        if self.mode == ComplementMode::PlusL && !self.size.is_multiple_of(2) {
            return Err(SampleError::InvalidConfig(format!(
                "+l complement size must be even, got {}",
                self.size
            )));
        }
        Ok(())
    }
}

/// Why an example is in a shot set. Random-baseline samples are tagged
/// `RandomFill`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    LexiconSelected,
    RandomFill,
    ComplementTarget,
    ComplementSlur,
    ComplementRandom,
}

impl Origin {
    pub fn is_complement(self) -> bool {
        matches!(
            self,
            Origin::ComplementTarget | Origin::ComplementSlur | Origin::ComplementRandom
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shot {
    pub example: Example,
    pub origin: Origin,
    /// Distinct matched term surfaces; empty until matched against a lexicon.
    pub matched_terms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotSet {
    pub config: SamplingConfig,
    pub shots: Vec<Shot>,
    /// Complement examples requested but unavailable.
    pub shortfall: usize,
}

impl ShotSet {
    pub fn len(&self) -> usize {
        self.shots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shots.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.shots.iter().map(|s| s.example.id.as_str())
    }

    pub fn examples(&self) -> impl Iterator<Item = &Example> {
        self.shots.iter().map(|s| &s.example)
    }

    pub fn count_origin(&self, origin: Origin) -> usize {
        self.shots.iter().filter(|s| s.origin == origin).count()
    }

    /// Fills `matched_terms` for every shot.
    pub fn annotate(&mut self, lexicon: &Lexicon, scope: &MatchScope) {
        for shot in &mut self.shots {
            shot.matched_terms = scope.classify(&shot.example, lexicon).matched_surfaces();
        }
    }

    fn sort(&mut self) {
        self.shots.sort_by(|a, b| a.example.id.cmp(&b.example.id));
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("invalid sampling config: {0}")]
    InvalidConfig(String),
    #[error("pool has {available} examples but {requested} were requested")]
    PoolTooSmall { requested: usize, available: usize },
    #[error("duplicate example id {0:?} in pool")]
    DuplicateId(String),
    #[error("config method is {found}, expected {expected}")]
    MethodMismatch { expected: Method, found: Method },
    #[error("shot set is already complemented")]
    AlreadyComplemented,
}

/// Pool references sorted by id, rejecting duplicate ids.
fn sorted_pool(pool: &[Example]) -> Result<Vec<&Example>, SampleError> {
    let mut sorted: Vec<&Example> = pool.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = sorted.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(SampleError::DuplicateId(w[0].id.clone()));
    }
    Ok(sorted)
}

fn check(pool: &[Example], config: &SamplingConfig, method: Method) -> Result<(), SampleError> {
    config.validate()?;
    if config.method != method {
        return Err(SampleError::MethodMismatch {
            expected: method,
            found: config.method,
        });
    }
    if pool.len() < config.size {
        return Err(SampleError::PoolTooSmall {
            requested: config.size,
            available: pool.len(),
        });
    }
    Ok(())
}

fn shot(example: &Example, origin: Origin, report: Option<&MatchReport<'_>>) -> Shot {
    Shot {
        example: example.clone(),
        origin,
        matched_terms: report.map(MatchReport::matched_surfaces).unwrap_or_default(),
    }
}

/// Uniform sample of `config.size` examples without replacement.
pub fn sample_random(pool: &[Example], config: &SamplingConfig) -> Result<ShotSet, SampleError> {
    check(pool, config, Method::Random)?;
    let sorted = sorted_pool(pool)?;
    let mut rng = ShotRng::new(config.seed);
    let mut set = ShotSet {
        config: *config,
        shots: rng
            .choose(&sorted, config.size)
            .into_iter()
            .map(|e| shot(e, Origin::RandomFill, None))
            .collect(),
        shortfall: 0,
    };
    set.sort();
    Ok(set)
}

/// Two-step lexicon-first selection with the default match scope.
pub fn sample_lexicon_first(
    pool: &[Example],
    lexicon: &Lexicon,
    config: &SamplingConfig,
) -> Result<ShotSet, SampleError> {
    sample_lexicon_first_scoped(pool, lexicon, config, &MatchScope::default())
}

/// Two-step lexicon-first selection: take every example containing a slur or
/// target term, then fill the remaining slots uniformly from the rest of the
/// pool. When there are more term-bearing examples than slots, a uniform
/// sample of them is taken instead.
pub fn sample_lexicon_first_scoped(
    pool: &[Example],
    lexicon: &Lexicon,
    config: &SamplingConfig,
    scope: &MatchScope,
) -> Result<ShotSet, SampleError> {
    check(pool, config, Method::Lexicon)?;
    let sorted = sorted_pool(pool)?;
    let reports: Vec<MatchReport<'_>> = sorted.iter().map(|e| scope.classify(e, lexicon)).collect();

    let (bearing, rest): (Vec<usize>, Vec<usize>) = (0..sorted.len()).partition(|&i| reports[i].bears_slur_or_target());

    let mut rng = ShotRng::new(config.seed);
    let mut shots = Vec::with_capacity(config.size);
    if bearing.len() <= config.size {
        shots.extend(
            bearing
                .iter()
                .map(|&i| shot(sorted[i], Origin::LexiconSelected, Some(&reports[i]))),
        );
        let fill = rng.choose(&rest, config.size - bearing.len());
        shots.extend(
            fill.into_iter()
                .map(|&i| shot(sorted[i], Origin::RandomFill, Some(&reports[i]))),
        );
    } else {
        shots.extend(
            rng.choose(&bearing, config.size)
                .into_iter()
                .map(|&i| shot(sorted[i], Origin::LexiconSelected, Some(&reports[i]))),
        );
    }
    let mut set = ShotSet {
        config: *config,
        shots,
        shortfall: 0,
    };
    set.sort();
    Ok(set)
}

/// Adds complement examples drawn from `pool` minus the base set, using the
/// default match scope.
pub fn complement(
    base: &ShotSet,
    pool: &[Example],
    lexicon: &Lexicon,
    config: &ComplementConfig,
) -> Result<ShotSet, SampleError> {
    complement_scoped(base, pool, lexicon, config, &MatchScope::default())
}

/// `+r` draws `size` examples uniformly. `+l` first draws `size/2`
/// target-bearing examples, then `size/2` slur-bearing examples from what is
/// left, so an example bearing both fills at most one bucket. Missing
/// examples are recorded in `shortfall` rather than failing.
pub fn complement_scoped(
    base: &ShotSet,
    pool: &[Example],
    lexicon: &Lexicon,
    config: &ComplementConfig,
    scope: &MatchScope,
) -> Result<ShotSet, SampleError> {
    config.validate()?;
    if base.config.complement.is_some() {
        return Err(SampleError::AlreadyComplemented);
    }
    let taken: HashSet<&str> = base.ids().collect();
    let candidates: Vec<&Example> = sorted_pool(pool)?
        .into_iter()
        .filter(|e| !taken.contains(e.id.as_str()))
        .collect();
    let reports: Vec<MatchReport<'_>> = candidates.iter().map(|e| scope.classify(e, lexicon)).collect();

    let mut rng = ShotRng::new(config.seed);
    let mut added: Vec<Shot> = Vec::new();
    let mut shortfall = 0;
    match config.mode {
        ComplementMode::PlusR => {
            let idx: Vec<usize> = (0..candidates.len()).collect();
            for &i in rng.choose(&idx, config.size) {
                added.push(shot(candidates[i], Origin::ComplementRandom, Some(&reports[i])));
            }
            shortfall = config.size - added.len();
        }
        ComplementMode::PlusL => {
            let half = config.size / 2;
            let targets: Vec<usize> = (0..candidates.len()).filter(|&i| reports[i].has_target).collect();
            let picked_targets: Vec<usize> = rng.choose(&targets, half).into_iter().copied().collect();
            shortfall += half - picked_targets.len();
            let used: HashSet<usize> = picked_targets.iter().copied().collect();
            let slurs: Vec<usize> = (0..candidates.len())
                .filter(|&i| reports[i].has_slur && !used.contains(&i))
                .collect();
            let picked_slurs: Vec<usize> = rng.choose(&slurs, half).into_iter().copied().collect();
            shortfall += half - picked_slurs.len();
            for i in picked_targets {
                added.push(shot(candidates[i], Origin::ComplementTarget, Some(&reports[i])));
            }
            for i in picked_slurs {
                added.push(shot(candidates[i], Origin::ComplementSlur, Some(&reports[i])));
            }
        }
    }

    let mut out = base.clone();
    out.config.complement = Some(*config);
    out.shots.extend(added);
    out.shortfall = shortfall;
    out.sort();
    Ok(out)
}

/// Distinct slur (S) and target (T) terms found in one shot set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub name: String,
    pub slurs: usize,
    pub targets: usize,
    pub slur_terms: Vec<String>,
    pub target_terms: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub rows: Vec<DistributionRow>,
}

impl DistributionReport {
    pub fn row(&self, name: &str) -> Option<&DistributionRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn to_table(&self) -> String {
        let mut rows = vec![vec!["Set".to_string(), "S".to_string(), "T".to_string()]];
        for r in &self.rows {
            rows.push(vec![r.name.clone(), r.slurs.to_string(), r.targets.to_string()]);
        }
        crate::report::align_columns(&rows)
    }
}

/// Counts distinct slur and target terms per set. A term carrying both types
/// counts toward both columns; each term is counted once per set.
pub fn distribution_row<'e, I>(name: &str, examples: I, lexicon: &Lexicon, scope: &MatchScope) -> DistributionRow
where
    I: IntoIterator<Item = &'e Example>,
{
    let mut slurs: BTreeSet<TermId> = BTreeSet::new();
    let mut targets: BTreeSet<TermId> = BTreeSet::new();
    for example in examples {
        for m in scope.classify(example, lexicon).matches {
            if m.term.types.is_slur() {
                slurs.insert(m.term_id);
            }
            if m.term.types.is_target() {
                targets.insert(m.term_id);
            }
        }
    }
    let surfaces = |ids: &BTreeSet<TermId>| -> Vec<String> {
        let set: BTreeSet<String> = ids.iter().map(|&i| lexicon.term(i).surface.clone()).collect();
        set.into_iter().collect()
    };
    DistributionRow {
        name: name.to_string(),
        slurs: slurs.len(),
        targets: targets.len(),
        slur_terms: surfaces(&slurs),
        target_terms: surfaces(&targets),
    }
}

/// Distribution report over named shot sets, in the given order.
pub fn distribution_report(sets: &[(&str, &ShotSet)], lexicon: &Lexicon) -> DistributionReport {
    DistributionReport {
        rows: sets
            .iter()
            .map(|(name, set)| distribution_row(name, set.examples(), lexicon, &MatchScope::default()))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// JSONL

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    method: Method,
    size: usize,
    seed: u64,
    complement: Option<ComplementMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    complement_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    complement_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shortfall: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    timestamp: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Line {
    id: String,
    label: Label,
    #[serde(default)]
    language: String,
    text: String,
    origin: Origin,
    #[serde(default)]
    matched_terms: Vec<String>,
}

#[derive(Debug, Error)]
pub enum ShotSetFormatError {
    #[error("empty shot set file (missing header)")]
    MissingHeader,
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: duplicate example id {id:?}")]
    DuplicateId { line: usize, id: String },
}

impl ShotSet {
    /// Serializes to JSONL: a header line followed by one line per shot.
    pub fn to_jsonl(&self, timestamp: Option<&str>) -> String {
        let c = self.config.complement;
        let header = Header {
            method: self.config.method,
            size: self.config.size,
            seed: self.config.seed,
            complement: c.map(|c| c.mode),
            complement_size: c.map(|c| c.size),
            complement_seed: c.map(|c| c.seed),
            shortfall: c.map(|_| self.shortfall),
            timestamp: timestamp.map(str::to_string),
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for s in &self.shots {
            let line = Line {
                id: s.example.id.clone(),
                label: s.example.label,
                language: s.example.language.clone(),
                text: s.example.text.clone(),
                origin: s.origin,
                matched_terms: s.matched_terms.clone(),
            };
            out.push_str(&serde_json::to_string(&line).expect("line serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(source: &str) -> Result<ShotSet, ShotSetFormatError> {
        let mut lines = source
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty());
        let (line, raw) = lines.next().ok_or(ShotSetFormatError::MissingHeader)?;
        let header: Header = serde_json::from_str(raw).map_err(|source| ShotSetFormatError::Json { line, source })?;
        let complement = match (header.complement, header.complement_size) {
            (Some(mode), size) => Some(ComplementConfig {
                mode,
                size: size.unwrap_or(0),
                seed: header.complement_seed.unwrap_or(header.seed),
            }),
            (None, _) => None,
        };
        let config = SamplingConfig {
            method: header.method,
            size: header.size,
            seed: header.seed,
            complement,
        };
        let mut shots = Vec::new();
        let mut seen = HashSet::new();
        for (line, raw) in lines {
            let l: Line = serde_json::from_str(raw).map_err(|source| ShotSetFormatError::Json { line, source })?;
            if !seen.insert(l.id.clone()) {
                return Err(ShotSetFormatError::DuplicateId { line, id: l.id });
            }
            shots.push(Shot {
                example: Example::new(l.id, l.label, l.language, l.text),
                origin: l.origin,
                matched_terms: l.matched_terms,
            });
        }
        Ok(ShotSet {
            config,
            shots,
            shortfall: header.shortfall.unwrap_or(0),
        })
    }
}

/// Origin counts, for summaries.
pub fn origin_counts(set: &ShotSet) -> BTreeMap<Origin, usize> {
    let mut counts = BTreeMap::new();
    for s in &set.shots {
        *counts.entry(s.origin).or_insert(0) += 1;
    }
    counts
}
