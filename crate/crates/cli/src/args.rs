use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "lexishot",
    version,
    about = "Lexicon-driven shot selection and analysis for hate speech data"
)]
pub struct Cli {
    /// key=value file mirroring the command-line flags; flags given on the
    /// command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Timestamp recorded in output metadata; `none` records nothing.
    #[arg(long, global = true, default_value = "none")]
    pub timestamp: String,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-country term counts by type combination.
    LexiconStats(LexiconStatsArgs),
    /// Compare computed per-country totals with declared ones.
    LexiconValidate(LexiconValidateArgs),
    /// Report lexicon matches for every corpus example (JSON Lines).
    Match(MatchArgs),
    /// Draw a shot set (random or lexicon-first).
    Sample(SampleArgs),
    /// Complement an existing shot set with +l or +r examples.
    Complement(ComplementArgs),
    /// Distinct slur (S) and target (T) terms per shot set.
    Distribution(DistributionArgs),
    /// Annotate a keyword list with lexicon types.
    AnnotateWords(AnnotateArgs),
    /// Representation shift between two embedding tables.
    RepShift(RepShiftArgs),
    /// Macro P/R/F1 over prediction files, aggregated across runs.
    Eval(EvalArgs),
    /// Macro P/R/F1 of a predictor restricted to shot sets.
    EvalShots(EvalShotsArgs),
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file (stdout when omitted).
    #[arg(short = 'o', long = "output", value_name = "FILE")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LexiconStatsArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct LexiconValidateArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    /// Declared totals, e.g. `Germany=50,India=50`.
    #[arg(long, value_delimiter = ',')]
    pub declared: Vec<String>,
    /// TSV of `country<TAB>total` lines.
    #[arg(long)]
    pub declared_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ScopeArgs {
    /// Restrict matching to these lexicon languages.
    #[arg(long, value_delimiter = ',', conflicts_with = "all_languages")]
    pub languages: Vec<String>,
    /// Match every lexicon term regardless of language.
    #[arg(long)]
    pub all_languages: bool,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub scope: ScopeArgs,
    /// Worker threads (output order does not depend on it).
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Random,
    Lexicon,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Required for `--method lexicon`; used to fill `matched_terms`.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long)]
    pub size: usize,
    #[arg(long, conflicts_with = "seeds")]
    pub seed: Option<u64>,
    /// Several seeds; writes one file per seed and prints a per-seed summary.
    /// The output path may contain `{seed}`, otherwise `-seed<N>` is added
    /// before the extension.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    #[command(flatten)]
    pub scope: ScopeArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    /// half target-bearing, half slur-bearing
    L,
    /// uniform
    R,
}

#[derive(Debug, Args)]
pub struct ComplementArgs {
    /// Shot set JSONL to complement.
    #[arg(long)]
    pub base: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 32)]
    pub size: usize,
    /// Defaults to the base set's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub scope: ScopeArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct DistributionArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    /// `[NAME[@COLUMN]=]PATH`; a `.tsv` path is read as a whole corpus.
    #[arg(long, required = true)]
    pub shots: Vec<String>,
    #[command(flatten)]
    pub scope: ScopeArgs,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct AnnotateArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub country: String,
    /// One word per line.
    #[arg(long)]
    pub words: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum MetricArg {
    #[default]
    Cosine,
    Distance,
}

#[derive(Debug, Args)]
pub struct RepShiftArgs {
    #[arg(long)]
    pub before: PathBuf,
    #[arg(long)]
    pub after: PathBuf,
    /// `NAME=WORDLIST`, repeatable.
    #[arg(long = "group", required = true)]
    pub groups: Vec<String>,
    /// Word list to draw a seeded random baseline group from.
    #[arg(long)]
    pub random_from: Option<PathBuf>,
    /// Baseline size; defaults to the number of distinct grouped words
    /// outside the stopword group (see `--stop-group`).
    #[arg(long)]
    pub random_count: Option<usize>,
    /// Adds the bundled stopword list for this language as the stopword group.
    #[arg(long, value_name = "LANG")]
    pub stopwords: Option<String>,
    #[arg(long, default_value = "Stop")]
    pub stop_group: String,
    #[arg(long, default_value = "Random")]
    pub random_group: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t)]
    pub metric: MetricArg,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum StdArg {
    #[default]
    Sample,
    Population,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_delimiter = ',', default_value = "HOF,NOT")]
    pub labels: Vec<String>,
    /// `[SET[@COLUMN]=]PATH`; repeated (SET, COLUMN) pairs are aggregated as runs.
    #[arg(long, required = true)]
    pub pred: Vec<String>,
    #[arg(long, value_enum, default_value_t)]
    pub std: StdArg,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct EvalShotsArgs {
    #[arg(long, value_delimiter = ',', default_value = "HOF,NOT")]
    pub labels: Vec<String>,
    /// `[SET[@COLUMN]=]PATH` of a shot set JSONL, repeatable.
    #[arg(long, required = true)]
    pub shots: Vec<String>,
    /// `[COLUMN=]PATH` of predictions covering the shots of that column.
    #[arg(long, required = true)]
    pub pred: Vec<String>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[command(flatten)]
    pub output: Output,
}

/// Flags that take no value; `key=true` in a config file turns them on.
pub const SWITCHES: &[&str] = &["all-languages"];
