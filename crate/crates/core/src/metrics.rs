//! Macro-averaged precision, recall and F1 with multi-seed aggregation.
//!
//! Zero denominators yield 0 for precision, recall and F1 alike. Macro
//! values are unweighted means over every declared class, including classes
//! with no support.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampler::ShotSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub gold: String,
    pub predicted: String,
}

impl PredictionRecord {
    pub fn new(id: impl Into<String>, gold: impl Into<String>, predicted: impl Into<String>) -> Self {
        PredictionRecord {
            id: id.into(),
            gold: gold.into(),
            predicted: predicted.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StdKind {
    /// Divides by n − 1.
    #[default]
    Sample,
    /// Divides by n.
    Population,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSpread {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Standard deviations across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub runs: usize,
    pub kind: StdKind,
    pub macro_f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub classes: Vec<ClassSpread>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub classes: Vec<ClassScores>,
    pub macro_f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    /// Present on aggregates; the scores above are then means over runs and
    /// `support` is summed over runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spread: Option<Spread>,
}

impl MetricSummary {
    pub fn labels(&self) -> Vec<&str> {
        self.classes.iter().map(|c| c.label.as_str()).collect()
    }

    pub fn class(&self, label: &str) -> Option<&ClassScores> {
        self.classes.iter().find(|c| c.label == label)
    }

    /// Builds a summary from per-class scores, computing the macro averages.
    pub fn from_classes(classes: Vec<ClassScores>) -> Self {
        let n = classes.len().max(1) as f64;
        MetricSummary {
            macro_f1: classes.iter().map(|c| c.f1).sum::<f64>() / n,
            macro_precision: classes.iter().map(|c| c.precision).sum::<f64>() / n,
            macro_recall: classes.iter().map(|c| c.recall).sum::<f64>() / n,
            classes,
            spread: None,
        }
    }

    /// Macro F1 with two decimals, followed by the standard deviation ×100 in
    /// parentheses when this is an aggregate over more than one run.
    pub fn display_f1(&self) -> String {
        match &self.spread {
            Some(s) if s.runs > 1 => format!("{:.2} ({:.1})", self.macro_f1, s.macro_f1 * 100.0),
            _ => format!("{:.2}", self.macro_f1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("no prediction records")]
    Empty,
    #[error("empty label set")]
    NoLabels,
    #[error("label {0:?} declared twice")]
    DuplicateLabel(String),
    #[error("record {record}: label {label:?} is not in the declared label set")]
    UndeclaredLabel { record: usize, label: String },
    #[error("no summaries to aggregate")]
    NothingToAggregate,
    #[error("label sets differ between summaries: {0:?} vs {1:?}")]
    LabelMismatch(Vec<String>, Vec<String>),
    #[error("missing predictions for: {}", .0.join(", "))]
    MissingPredictions(Vec<String>),
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn macro_scores<S: AsRef<str>>(records: &[PredictionRecord], labels: &[S]) -> Result<MetricSummary, MetricsError> {
    if labels.is_empty() {
        return Err(MetricsError::NoLabels);
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.as_ref(), i).is_some() {
            return Err(MetricsError::DuplicateLabel(l.as_ref().to_string()));
        }
    }
    if records.is_empty() {
        return Err(MetricsError::Empty);
    }
    let k = labels.len();
    let (mut tp, mut gold_n, mut pred_n) = (vec![0; k], vec![0; k], vec![0; k]);
    for (i, r) in records.iter().enumerate() {
        let lookup = |label: &str| {
            index.get(label).copied().ok_or_else(|| MetricsError::UndeclaredLabel {
                record: i + 1,
                label: label.to_string(),
            })
        };
        let g = lookup(&r.gold)?;
        let p = lookup(&r.predicted)?;
        gold_n[g] += 1;
        pred_n[p] += 1;
        if g == p {
            tp[g] += 1;
        }
    }
    let classes = labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let precision = ratio(tp[i], pred_n[i]);
            let recall = ratio(tp[i], gold_n[i]);
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            ClassScores {
                label: l.as_ref().to_string(),
                precision,
                recall,
                f1,
                support: gold_n[i],
            }
        })
        .collect();
    Ok(MetricSummary::from_classes(classes))
}

fn mean_std(values: &[f64], kind: StdKind) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let denom = match kind {
        StdKind::Sample => n - 1.0,
        StdKind::Population => n,
    };
    let std = if denom <= 0.0 { 0.0 } else { (ss / denom).sqrt() };
    (mean, std)
}

/// Mean and standard deviation of every metric across runs (e.g. seeds).
/// Per-class entries are matched by label, in the first summary's order.
pub fn aggregate_seeds(summaries: &[MetricSummary], kind: StdKind) -> Result<MetricSummary, MetricsError> {
    let first = summaries.first().ok_or(MetricsError::NothingToAggregate)?;
    let labels: Vec<String> = first.labels().into_iter().map(String::from).collect();
    let label_set: BTreeSet<&str> = first.labels().into_iter().collect();
    for s in &summaries[1..] {
        if s.labels().into_iter().collect::<BTreeSet<_>>() != label_set {
            return Err(MetricsError::LabelMismatch(
                labels.clone(),
                s.labels().into_iter().map(String::from).collect(),
            ));
        }
    }
    let stat = |f: &dyn Fn(&MetricSummary) -> f64| {
        let v: Vec<f64> = summaries.iter().map(f).collect();
        mean_std(&v, kind)
    };
    let mut classes = Vec::new();
    let mut class_spread = Vec::new();
    for label in &labels {
        let get = |s: &MetricSummary| s.class(label).expect("label sets checked").clone();
        let (p, p_sd) = stat(&|s| get(s).precision);
        let (r, r_sd) = stat(&|s| get(s).recall);
        let (f, f_sd) = stat(&|s| get(s).f1);
        classes.push(ClassScores {
            label: label.clone(),
            precision: p,
            recall: r,
            f1: f,
            support: summaries.iter().map(|s| get(s).support).sum(),
        });
        class_spread.push(ClassSpread {
            label: label.clone(),
            precision: p_sd,
            recall: r_sd,
            f1: f_sd,
        });
    }
    let (macro_f1, f1_sd) = stat(&|s| s.macro_f1);
    let (macro_precision, p_sd) = stat(&|s| s.macro_precision);
    let (macro_recall, r_sd) = stat(&|s| s.macro_recall);
    Ok(MetricSummary {
        classes,
        macro_f1,
        macro_precision,
        macro_recall,
        spread: Some(Spread {
            runs: summaries.len(),
            kind,
            macro_f1: f1_sd,
            macro_precision: p_sd,
            macro_recall: r_sd,
            classes: class_spread,
        }),
    })
}

/// Scores a predictor on the examples of a shot set. Predictions for ids
/// outside the set are ignored.
pub fn score_shot_set<S: AsRef<str>>(
    shots: &ShotSet,
    predictions: &[PredictionRecord],
    labels: &[S],
) -> Result<MetricSummary, MetricsError> {
    let by_id: HashMap<&str, &PredictionRecord> = predictions.iter().map(|p| (p.id.as_str(), p)).collect();
    let mut missing = Vec::new();
    let mut records = Vec::with_capacity(shots.len());
    for id in shots.ids() {
        match by_id.get(id) {
            Some(p) => records.push((*p).clone()),
            None => missing.push(id.to_string()),
        }
    }
    if !missing.is_empty() {
        return Err(MetricsError::MissingPredictions(missing));
    }
    macro_scores(&records, labels)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredictionsError {
    #[error("line {line}: expected 3 tab-separated columns (id, gold, pred), found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: label {label:?} is not in the declared label set")]
    UndeclaredLabel { line: usize, label: String },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { line: usize, id: String },
}

/// Parses predictions TSV (`id<TAB>gold<TAB>pred`). An optional first line
/// `id\tgold\tpred` is skipped. With `labels`, every label is checked.
pub fn parse_predictions<S: AsRef<str>>(
    source: &str,
    labels: Option<&[S]>,
) -> Result<Vec<PredictionRecord>, PredictionsError> {
    let declared: Option<HashSet<&str>> = labels.map(|l| l.iter().map(AsRef::as_ref).collect());
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() || raw.starts_with('#') || (out.is_empty() && raw == "id\tgold\tpred") {
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(PredictionsError::ColumnCount {
                line,
                found: cols.len(),
            });
        }
        if let Some(set) = &declared {
            for label in &cols[1..] {
                if !set.contains(label) {
                    return Err(PredictionsError::UndeclaredLabel {
                        line,
                        label: label.to_string(),
                    });
                }
            }
        }
        if !seen.insert(cols[0].to_string()) {
            return Err(PredictionsError::DuplicateId {
                line,
                id: cols[0].to_string(),
            });
        }
        out.push(PredictionRecord::new(cols[0], cols[1], cols[2]));
    }
    Ok(out)
}

pub fn write_predictions(records: &[PredictionRecord]) -> String {
    records
        .iter()
        .map(|r| format!("{}\t{}\t{}\n", r.id, r.gold, r.predicted))
        .collect()
}

/// Macro F1 laid out with sets as rows and columns such as languages.
#[derive(Debug, Clone, Default)]
pub struct MetricTable {
    rows: Vec<String>,
    columns: Vec<String>,
    cells: HashMap<(String, String), MetricSummary>,
}

impl MetricTable {
    pub fn insert(&mut self, row: &str, column: &str, summary: MetricSummary) {
        if !self.rows.iter().any(|r| r == row) {
            self.rows.push(row.to_string());
        }
        if !self.columns.iter().any(|c| c == column) {
            self.columns.push(column.to_string());
        }
        self.cells.insert((row.to_string(), column.to_string()), summary);
    }

    pub fn get(&self, row: &str, column: &str) -> Option<&MetricSummary> {
        self.cells.get(&(row.to_string(), column.to_string()))
    }

    pub fn render(&self) -> String {
        let mut rows = Vec::new();
        let mut header = vec!["Set".to_string()];
        header.extend(self.columns.iter().cloned());
        rows.push(header);
        for r in &self.rows {
            let mut row = vec![r.clone()];
            for c in &self.columns {
                row.push(
                    self.get(r, c)
                        .map_or_else(|| "-".to_string(), MetricSummary::display_f1),
                );
            }
            rows.push(row);
        }
        crate::report::align_columns(&rows)
    }
}
