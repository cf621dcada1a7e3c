use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use lexishot::corpus::parse_corpus;
use lexishot::interp::{builtin_stopwords, sample_baseline_words};
use lexishot::metrics::{parse_predictions, MetricTable};
use lexishot::report::align_columns;
use lexishot::sampler::{
    complement_scoped, distribution_row, origin_counts, sample_lexicon_first_scoped, DistributionRow,
};
use lexishot::{
    aggregate_seeds, annotate_words, compute_stats, macro_scores, sample_random, score_shot_set, shift_report,
    validate_against_declared, ComplementConfig, ComplementMode, EmbeddingTable, Example, Lexicon, MatchScope, Method,
    MetricSummary, Origin, PredictionRecord, SamplingConfig, ShiftMetric, ShotSet, StdKind,
};

use crate::args::*;
use crate::{read_input, CliError, CliResult};

pub fn dispatch(cli: Cli, stdout: &mut dyn Write) -> CliResult {
    let timestamp = (cli.timestamp != "none").then_some(cli.timestamp.as_str());
    match cli.command {
        Command::LexiconStats(a) => lexicon_stats(a, stdout),
        Command::LexiconValidate(a) => lexicon_validate(a, stdout),
        Command::Match(a) => match_corpus(a, stdout),
        Command::Sample(a) => sample(a, timestamp, stdout),
        Command::Complement(a) => complement(a, timestamp, stdout),
        Command::Distribution(a) => distribution(a, stdout),
        Command::AnnotateWords(a) => annotate(a, stdout),
        Command::RepShift(a) => rep_shift(a, stdout),
        Command::Eval(a) => eval(a, stdout),
        Command::EvalShots(a) => eval_shots(a, stdout),
    }
}

// ---------------------------------------------------------------------------
// helpers

fn data_err(path: &Path, e: impl Display) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn emit(output: &Output, stdout: &mut dyn Write, text: &str) -> CliResult {
    match &output.path {
        Some(path) => write_file(path, text),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Data(format!("stdout: {e}"))),
    }
}

fn write_file(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| data_err(path, e))
}

fn json_text(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn load_lexicon(path: &Path) -> CliResult<Lexicon> {
    Lexicon::parse(&read_input(path)?).map_err(|e| data_err(path, e))
}

fn load_corpus(path: &Path) -> CliResult<Vec<Example>> {
    parse_corpus(&read_input(path)?).map_err(|e| data_err(path, e))
}

fn load_shots(path: &Path) -> CliResult<ShotSet> {
    ShotSet::from_jsonl(&read_input(path)?).map_err(|e| data_err(path, e))
}

fn load_embeddings(path: &Path) -> CliResult<EmbeddingTable> {
    EmbeddingTable::parse(&read_input(path)?).map_err(|e| data_err(path, e))
}

/// Non-empty, non-comment lines, trimmed.
fn load_words(path: &Path) -> CliResult<Vec<String>> {
    Ok(read_input(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

fn scope(args: &ScopeArgs) -> MatchScope {
    if args.all_languages {
        MatchScope::All
    } else if !args.languages.is_empty() {
        MatchScope::Languages(args.languages.iter().map(|l| l.trim().to_string()).collect())
    } else {
        MatchScope::CountryOfLanguage
    }
}

fn thread_pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Data(format!("thread pool: {e}")))
}

/// A `[NAME[@COLUMN]=]PATH` argument.
struct Spec {
    name: String,
    column: Option<String>,
    path: PathBuf,
}

fn parse_spec(raw: &str) -> CliResult<Spec> {
    let (label, path) = match raw.split_once('=') {
        Some((l, p)) => (Some(l), p),
        None => (None, raw),
    };
    if path.is_empty() {
        return Err(CliError::Usage(format!("{raw:?}: missing path")));
    }
    let path = PathBuf::from(path);
    let stem = || {
        path.file_stem()
            .map_or_else(|| raw.to_string(), |s| s.to_string_lossy().into_owned())
    };
    let (name, column) = match label {
        None => (stem(), None),
        Some(l) => match l.split_once('@') {
            Some((n, c)) => (if n.is_empty() { stem() } else { n.to_string() }, Some(c.to_string())),
            None => (l.to_string(), None),
        },
    };
    Ok(Spec { name, column, path })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

// ---------------------------------------------------------------------------
// lexicon

fn lexicon_stats(a: LexiconStatsArgs, stdout: &mut dyn Write) -> CliResult {
    let stats = compute_stats(&load_lexicon(&a.lexicon)?);
    let text = match a.format {
        Format::Text => stats.to_table(),
        Format::Json => json_text(&stats),
    };
    emit(&a.output, stdout, &text)
}

fn parse_declared_pair(raw: &str, origin: &str) -> CliResult<(String, usize)> {
    let (country, n) = raw
        .split_once('=')
        .or_else(|| raw.split_once('\t'))
        .ok_or_else(|| CliError::Usage(format!("{origin}: expected COUNTRY=N, got {raw:?}")))?;
    let n = n
        .trim()
        .parse()
        .map_err(|_| CliError::Data(format!("{origin}: invalid total {:?}", n.trim())))?;
    Ok((country.trim().to_string(), n))
}

fn lexicon_validate(a: LexiconValidateArgs, stdout: &mut dyn Write) -> CliResult {
    let lexicon = load_lexicon(&a.lexicon)?;
    let mut declared = BTreeMap::new();
    if let Some(path) = &a.declared_file {
        for (i, line) in read_input(path)?.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let origin = format!("{}: line {}", path.display(), i + 1);
            let (c, n) = parse_declared_pair(line, &origin).map_err(|e| CliError::Data(e.to_string()))?;
            declared.insert(c, n);
        }
    }
    for raw in &a.declared {
        let (c, n) = parse_declared_pair(raw, "--declared")?;
        declared.insert(c, n);
    }
    if declared.is_empty() {
        return Err(CliError::Usage(
            "no declared totals (use --declared or --declared-file)".into(),
        ));
    }
    let stats = compute_stats(&lexicon);
    let found = validate_against_declared(&stats, &declared);
    let text = match a.format {
        Format::Json => json_text(&json!({ "ok": found.is_empty(), "discrepancies": found })),
        Format::Text if found.is_empty() => format!("OK: {} declared totals match\n", declared.len()),
        Format::Text => found
            .iter()
            .map(|d| format!("{}: computed {}, declared {}\n", d.country, d.computed, d.declared))
            .collect(),
    };
    emit(&a.output, stdout, &text)?;
    if found.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invalid)
    }
}

// ---------------------------------------------------------------------------
// matching and sampling

fn match_corpus(a: MatchArgs, stdout: &mut dyn Write) -> CliResult {
    let lexicon = load_lexicon(&a.lexicon)?;
    let corpus = load_corpus(&a.corpus)?;
    let scope = scope(&a.scope);
    let lines: Vec<String> = thread_pool(a.jobs)?.install(|| {
        corpus
            .par_iter()
            .map(|e| scope.classify(e, &lexicon).to_json().to_string())
            .collect()
    });
    let mut text = lines.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    emit(&a.output, stdout, &text)
}

fn draw(
    pool: &[Example],
    lexicon: Option<&Lexicon>,
    config: &SamplingConfig,
    scope: &MatchScope,
) -> CliResult<ShotSet> {
    let set = match (config.method, lexicon) {
        (Method::Random, lex) => {
            let mut set = sample_random(pool, config).map_err(|e| CliError::Data(e.to_string()))?;
            if let Some(lex) = lex {
                set.annotate(lex, scope);
            }
            set
        }
        (Method::Lexicon, Some(lex)) => {
            sample_lexicon_first_scoped(pool, lex, config, scope).map_err(|e| CliError::Data(e.to_string()))?
        }
        (Method::Lexicon, None) => {
            return Err(CliError::Usage("--method lexicon requires --lexicon".into()));
        }
    };
    Ok(set)
}

fn seed_path(template: &Path, seed: u64) -> PathBuf {
    let s = template.to_string_lossy();
    if s.contains("{seed}") {
        return PathBuf::from(s.replace("{seed}", &seed.to_string()));
    }
    let stem = template
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match template.extension() {
        Some(ext) => format!("{stem}-seed{seed}.{}", ext.to_string_lossy()),
        None => format!("{stem}-seed{seed}"),
    };
    template.with_file_name(name)
}

fn sample(a: SampleArgs, timestamp: Option<&str>, stdout: &mut dyn Write) -> CliResult {
    let method = match a.method {
        MethodArg::Random => Method::Random,
        MethodArg::Lexicon => Method::Lexicon,
    };
    let pool = load_corpus(&a.corpus)?;
    let lexicon = a.lexicon.as_deref().map(load_lexicon).transpose()?;
    let scope = scope(&a.scope);

    if let Some(seed) = a.seed {
        let set = draw(
            &pool,
            lexicon.as_ref(),
            &SamplingConfig::new(method, a.size, seed),
            &scope,
        )?;
        return emit(&a.output, stdout, &set.to_jsonl(timestamp));
    }
    if a.seeds.is_empty() {
        return Err(CliError::Usage("one of --seed or --seeds is required".into()));
    }
    let template = a
        .output
        .path
        .as_ref()
        .ok_or_else(|| CliError::Usage("--seeds requires -o/--output (one file per seed)".into()))?;

    let mut header = vec!["seed", "file", "lexicon-selected", "random-fill"];
    if lexicon.is_some() {
        header.extend(["S", "T"]);
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); header.len() - 2];
    let mut rows = vec![header.into_iter().map(String::from).collect::<Vec<_>>()];
    for &seed in &a.seeds {
        let set = draw(
            &pool,
            lexicon.as_ref(),
            &SamplingConfig::new(method, a.size, seed),
            &scope,
        )?;
        let path = seed_path(template, seed);
        write_file(&path, &set.to_jsonl(timestamp))?;
        let counts = origin_counts(&set);
        let mut values = vec![
            *counts.get(&Origin::LexiconSelected).unwrap_or(&0) as f64,
            *counts.get(&Origin::RandomFill).unwrap_or(&0) as f64,
        ];
        if let Some(lex) = &lexicon {
            let d = distribution_row("", set.examples(), lex, &scope);
            values.extend([d.slurs as f64, d.targets as f64]);
        }
        let mut row = vec![seed.to_string(), path.display().to_string()];
        row.extend(values.iter().map(|v| v.to_string()));
        rows.push(row);
        for (col, v) in columns.iter_mut().zip(values) {
            col.push(v);
        }
    }
    let stats: Vec<(f64, f64)> = columns.iter().map(|c| mean_std(c)).collect();
    let mut mean_row = vec!["mean".to_string(), String::new()];
    mean_row.extend(stats.iter().map(|(m, _)| format!("{m:.2}")));
    let mut std_row = vec!["std".to_string(), String::new()];
    std_row.extend(stats.iter().map(|(_, s)| format!("{s:.2}")));
    rows.push(mean_row);
    rows.push(std_row);
    stdout
        .write_all(align_columns(&rows).as_bytes())
        .map_err(|e| CliError::Data(format!("stdout: {e}")))
}

fn complement(a: ComplementArgs, timestamp: Option<&str>, stdout: &mut dyn Write) -> CliResult {
    let base = load_shots(&a.base)?;
    let pool = load_corpus(&a.corpus)?;
    let lexicon = load_lexicon(&a.lexicon)?;
    let config = ComplementConfig {
        mode: match a.mode {
            ModeArg::L => ComplementMode::PlusL,
            ModeArg::R => ComplementMode::PlusR,
        },
        size: a.size,
        seed: a.seed.unwrap_or(base.config.seed),
    };
    let set = complement_scoped(&base, &pool, &lexicon, &config, &scope(&a.scope))
        .map_err(|e| CliError::Data(e.to_string()))?;
    if set.shortfall > 0 {
        eprintln!("warning: {} complement examples could not be drawn", set.shortfall);
    }
    emit(&a.output, stdout, &set.to_jsonl(timestamp))
}

fn distribution(a: DistributionArgs, stdout: &mut dyn Write) -> CliResult {
    let lexicon = load_lexicon(&a.lexicon)?;
    let scope = scope(&a.scope);
    let mut cells: Vec<(Spec, DistributionRow)> = Vec::new();
    for raw in &a.shots {
        let spec = parse_spec(raw)?;
        let is_corpus = spec.path.extension().is_some_and(|e| e == "tsv");
        let row = if is_corpus {
            distribution_row(&spec.name, &load_corpus(&spec.path)?, &lexicon, &scope)
        } else {
            distribution_row(&spec.name, load_shots(&spec.path)?.examples(), &lexicon, &scope)
        };
        cells.push((spec, row));
    }

    let text = match a.format {
        Format::Json => json_text(
            &cells
                .iter()
                .map(|(spec, row)| {
                    let mut v = serde_json::to_value(row).expect("serializable");
                    v["column"] = spec.column.clone().map_or(Value::Null, Value::String);
                    v
                })
                .collect::<Vec<_>>(),
        ),
        Format::Text if cells.iter().all(|(s, _)| s.column.is_none()) => lexishot::DistributionReport {
            rows: cells.into_iter().map(|(_, r)| r).collect(),
        }
        .to_table(),
        Format::Text => {
            let mut names: Vec<&str> = Vec::new();
            let mut columns: Vec<&str> = Vec::new();
            let mut grid: BTreeMap<(&str, &str), &DistributionRow> = BTreeMap::new();
            for (spec, row) in &cells {
                let col = spec.column.as_deref().unwrap_or("");
                if !names.contains(&spec.name.as_str()) {
                    names.push(&spec.name);
                }
                if !columns.contains(&col) {
                    columns.push(col);
                }
                grid.insert((&spec.name, col), row);
            }
            let mut rows = vec![std::iter::once("Set".to_string())
                .chain(columns.iter().flat_map(|c| [format!("{c} S"), format!("{c} T")]))
                .collect::<Vec<_>>()];
            for name in names {
                let mut row = vec![name.to_string()];
                for col in &columns {
                    match grid.get(&(name, *col)) {
                        Some(r) => row.extend([r.slurs.to_string(), r.targets.to_string()]),
                        None => row.extend(["-".to_string(), "-".to_string()]),
                    }
                }
                rows.push(row);
            }
            align_columns(&rows)
        }
    };
    emit(&a.output, stdout, &text)
}

// ---------------------------------------------------------------------------
// interpretability

fn annotate(a: AnnotateArgs, stdout: &mut dyn Write) -> CliResult {
    let lexicon = load_lexicon(&a.lexicon)?;
    let words = load_words(&a.words)?;
    let list = annotate_words(&words, &lexicon, &a.country);
    let text = match a.format {
        Format::Text => list.to_table(),
        Format::Json => json_text(&list),
    };
    emit(&a.output, stdout, &text)
}

fn rep_shift(a: RepShiftArgs, stdout: &mut dyn Write) -> CliResult {
    let before = load_embeddings(&a.before)?;
    let after = load_embeddings(&a.after)?;
    let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for raw in &a.groups {
        let (name, path) = raw
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--group expects NAME=PATH, got {raw:?}")))?;
        groups
            .entry(name.to_string())
            .or_default()
            .extend(load_words(Path::new(path))?);
    }
    if let Some(lang) = &a.stopwords {
        let words =
            builtin_stopwords(lang).ok_or_else(|| CliError::Usage(format!("no bundled stopword list for {lang:?}")))?;
        // only words present in both tables; the lists are generic
        let present = words
            .into_iter()
            .filter(|w| before.get(w).is_some() && after.get(w).is_some())
            .map(String::from);
        groups.entry(a.stop_group.clone()).or_default().extend(present);
    }
    if let Some(path) = &a.random_from {
        if groups.contains_key(&a.random_group) {
            return Err(CliError::Usage(format!(
                "group {:?} is given explicitly and with --random-from",
                a.random_group
            )));
        }
        let grouped: BTreeSet<String> = groups.values().flatten().cloned().collect();
        let count = a.random_count.unwrap_or_else(|| {
            groups
                .iter()
                .filter(|(g, _)| **g != a.stop_group)
                .flat_map(|(_, w)| w)
                .collect::<BTreeSet<_>>()
                .len()
        });
        let candidates = load_words(path)?;
        let words = sample_baseline_words(&candidates, &grouped, count, a.seed).map_err(|e| data_err(path, e))?;
        groups.insert(a.random_group.clone(), words);
    }
    let metric = match a.metric {
        MetricArg::Cosine => ShiftMetric::Cosine,
        MetricArg::Distance => ShiftMetric::Distance,
    };
    let report = thread_pool(a.jobs)?
        .install(|| shift_report(&before, &after, &groups, metric))
        .map_err(|e| CliError::Data(e.to_string()))?;
    let text = match a.format {
        Format::Text => report.to_table(),
        Format::Json => json_text(&report),
    };
    emit(&a.output, stdout, &text)
}

// ---------------------------------------------------------------------------
// evaluation

fn std_kind(arg: StdArg) -> StdKind {
    match arg {
        StdArg::Sample => StdKind::Sample,
        StdArg::Population => StdKind::Population,
    }
}

/// Groups run summaries by (set, column), keeping first-seen order.
#[derive(Default)]
struct Runs {
    order: Vec<(String, String)>,
    runs: BTreeMap<(String, String), Vec<MetricSummary>>,
}

impl Runs {
    fn push(&mut self, set: &str, column: &str, summary: MetricSummary) {
        let key = (set.to_string(), column.to_string());
        if !self.runs.contains_key(&key) {
            self.order.push(key.clone());
        }
        self.runs.entry(key).or_default().push(summary);
    }

    fn render(self, kind: StdKind, format: Format) -> CliResult<String> {
        let mut table = MetricTable::default();
        let mut json_rows = Vec::new();
        for key in &self.order {
            let runs = &self.runs[key];
            let summary = if runs.len() == 1 {
                runs[0].clone()
            } else {
                aggregate_seeds(runs, kind).map_err(|e| CliError::Data(format!("{} {}: {e}", key.0, key.1)))?
            };
            json_rows.push(json!({ "set": key.0, "column": key.1, "runs": runs.len(), "summary": summary }));
            table.insert(&key.0, &key.1, summary);
        }
        Ok(match format {
            Format::Text => table.render(),
            Format::Json => json_text(&json_rows),
        })
    }
}

const DEFAULT_COLUMN: &str = "Macro F1";

fn load_predictions(path: &Path, labels: &[String]) -> CliResult<Vec<PredictionRecord>> {
    parse_predictions(&read_input(path)?, Some(labels)).map_err(|e| data_err(path, e))
}

fn eval(a: EvalArgs, stdout: &mut dyn Write) -> CliResult {
    let mut runs = Runs::default();
    for raw in &a.pred {
        let spec = parse_spec(raw)?;
        let records = load_predictions(&spec.path, &a.labels)?;
        let summary = macro_scores(&records, &a.labels).map_err(|e| data_err(&spec.path, e))?;
        runs.push(&spec.name, spec.column.as_deref().unwrap_or(DEFAULT_COLUMN), summary);
    }
    let text = runs.render(std_kind(a.std), a.format)?;
    emit(&a.output, stdout, &text)
}

fn eval_shots(a: EvalShotsArgs, stdout: &mut dyn Write) -> CliResult {
    let mut preds: BTreeMap<String, Vec<PredictionRecord>> = BTreeMap::new();
    for raw in &a.pred {
        let (column, path) = match raw.split_once('=') {
            Some((c, p)) => (c.to_string(), p),
            None => (DEFAULT_COLUMN.to_string(), raw.as_str()),
        };
        let records = load_predictions(Path::new(path), &a.labels)?;
        preds.entry(column).or_default().extend(records);
    }
    let mut runs = Runs::default();
    for raw in &a.shots {
        let spec = parse_spec(raw)?;
        let column = spec.column.as_deref().unwrap_or(DEFAULT_COLUMN);
        let records = preds
            .get(column)
            .ok_or_else(|| CliError::Usage(format!("no --pred given for column {column:?}")))?;
        let shots = load_shots(&spec.path)?;
        let summary = score_shot_set(&shots, records, &a.labels).map_err(|e| data_err(&spec.path, e))?;
        runs.push(&spec.name, column, summary);
    }
    let text = runs.render(StdKind::Sample, a.format)?;
    emit(&a.output, stdout, &text)
}
