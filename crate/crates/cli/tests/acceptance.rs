//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use serde_json::Value;

use common::{confusion_oracle, impl_matches, oracle_lexicon, oracle_matches, random_document};
use lexishot::corpus::parse_corpus;
use lexishot::rng::ShotRng;
use lexishot::sampler::{distribution_row, sample_lexicon_first_scoped};
use lexishot::{
    aggregate_seeds, cosine, macro_scores, sample_lexicon_first, sample_random, word_vector, Example, Label, Lexicon,
    MatchScope, Method, MetricSummary, PredictionRecord, SamplingConfig, StdKind,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn core_fixture(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "core", "tests", "fixtures", name]
        .iter()
        .collect()
}

fn ablation_fixture(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", "ablation", name]
        .iter()
        .collect()
}

fn read(path: &PathBuf) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let argv = std::iter::once("lexishot").chain(args.iter().copied());
    let code = lexishot_cli::run(argv, &mut out);
    (code, String::from_utf8(out).expect("utf-8 output"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

// ---------------------------------------------------------------------------

fn lexicon_table() -> Outcome {
    let start = Instant::now();
    let lexicon = core_fixture("lexicon_counts.tsv");
    let lexicon = lexicon.to_str().unwrap();
    let (code, out) = cli(&["lexicon-stats", "--lexicon", lexicon, "--format", "json"]);
    ensure(code == 0, || format!("lexicon-stats exited {code}"))?;
    let stats: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let expected: [(&str, [u64; 6], u64); 4] = [
        ("Brazil", [30, 4, 11, 0, 0, 0], 45),
        ("Germany", [4, 3, 18, 1, 18, 5], 49),
        ("India", [3, 7, 35, 0, 1, 0], 46),
        ("Kenya", [21, 29, 43, 2, 6, 12], 113),
    ];
    let keys = [
        "neutral",
        "target",
        "slur",
        "neutral_target",
        "neutral_slur",
        "target_slur",
    ];
    for (country, row, total) in expected {
        let c = &stats["countries"][country];
        let got: Vec<u64> = keys.iter().map(|k| c[*k].as_u64().unwrap_or(u64::MAX)).collect();
        ensure(got == row, || format!("{country}: {got:?} != {row:?}"))?;
        let sum: u64 = got.iter().sum::<u64>() + c["other"].as_u64().unwrap_or(u64::MAX);
        ensure(sum == total, || format!("{country}: total {sum} != {total}"))?;
    }

    let declared = core_fixture("declared_totals.tsv");
    let (code, out) = cli(&[
        "lexicon-validate",
        "--lexicon",
        lexicon,
        "--declared-file",
        declared.to_str().unwrap(),
    ]);
    ensure(code == 1, || format!("lexicon-validate exited {code}, expected 1"))?;
    let want =
        "Germany: computed 49, declared 50\nIndia: computed 46, declared 50\nKenya: computed 113, declared 116\n";
    ensure(out == want, || format!("lexicon-validate printed {out:?}"))?;
    let took = within(start, Duration::from_secs(1))?;
    Ok(format!("4 countries exact, 3 discrepancies, {took:.0?}"))
}

fn annotation() -> Outcome {
    let lexicon = core_fixture("lexicon_wordlists.tsv");
    let expected = [("Brazil", 5, 0), ("Germany", 1, 4), ("India", 2, 5), ("Kenya", 1, 3)];
    for (country, slurs, targets) in expected {
        let words = core_fixture(&format!("top10_{}.txt", country.to_lowercase()));
        let args = [
            "annotate-words",
            "--lexicon",
            lexicon.to_str().unwrap(),
            "--country",
            country,
            "--words",
            words.to_str().unwrap(),
            "--format",
            "json",
        ];
        let (code, out) = cli(&args);
        ensure(code == 0, || format!("{country}: exited {code}"))?;
        let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
        let got = (v["summary"]["slurs"].as_u64(), v["summary"]["targets"].as_u64());
        ensure(got == (Some(slurs), Some(targets)), || {
            format!("{country}: got {got:?}, expected ({slurs}, {targets})")
        })?;
        let (_, text) = cli(&args[..7]);
        let plural = if targets == 1 { "target" } else { "targets" };
        let slur_word = if slurs == 1 { "slur" } else { "slurs" };
        let line = format!("{country}: {slurs} {slur_word}, {targets} {plural}");
        ensure(text.lines().last().is_some_and(|l| l.starts_with(&line)), || {
            format!("{country}: summary line {:?}", text.lines().last())
        })?;
    }
    Ok("Brazil 5/0, Germany 1/4, India 2/5, Kenya 1/3".into())
}

fn shuffled(pool: &[Example], seed: u64) -> Vec<Example> {
    let mut rng = ShotRng::new(seed);
    let mut out = pool.to_vec();
    for i in (1..out.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        out.swap(i, j);
    }
    out
}

/// Slur/target bearing per the brute-force oracle, over all terms.
fn oracle_bears(text: &str, lexicon: &Lexicon) -> bool {
    oracle_matches(text, lexicon, None)
        .iter()
        .any(|(_, _, surface, country, language)| {
            lexicon.terms().iter().any(|t| {
                &t.surface == surface
                    && &t.country == country
                    && &t.language == language
                    && (t.types.is_slur() || t.types.is_target())
            })
        })
}

fn sampler_contract() -> Outcome {
    let start = Instant::now();
    let lexicon = Lexicon::parse(&read(&core_fixture("lexicon_dist.tsv"))).map_err(|e| e.to_string())?;
    let de = parse_corpus(&read(&core_fixture("corpus_de.tsv"))).map_err(|e| e.to_string())?;
    let hi = parse_corpus(&read(&core_fixture("corpus_hi.tsv"))).map_err(|e| e.to_string())?;

    // (a) determinism over runs and pool order
    let mut seeds = ShotRng::new(20240);
    for _ in 0..20 {
        let seed = seeds.next_u64();
        for (method, size) in [(Method::Random, 64), (Method::Lexicon, 32), (Method::Lexicon, 96)] {
            let config = SamplingConfig::new(method, size, seed);
            let draw = |pool: &[Example]| {
                match method {
                    Method::Random => sample_random(pool, &config),
                    Method::Lexicon => sample_lexicon_first(pool, &lexicon, &config),
                }
                .map(|s| s.to_jsonl(None))
                .map_err(|e| e.to_string())
            };
            let first = draw(&de)?;
            ensure(draw(&de)? == first, || format!("seed {seed}: rerun differs"))?;
            ensure(draw(&shuffled(&de, seed ^ 1))? == first, || {
                format!("seed {seed}: permutation differs")
            })?;
        }
    }

    // (b) inclusion on random fixtures
    let oracle_lex = oracle_lexicon();
    let languages = ["de", "pt-BR", "hi", "en", "sw"];
    let mut rng = ShotRng::new(99);
    let (mut fit, mut overflow) = (0, 0);
    for fixture in 0..100 {
        let n = 5 + rng.below(60) as usize;
        let pool: Vec<Example> = (0..n)
            .map(|i| {
                let label = if rng.below(2) == 0 {
                    Label::Hateful
                } else {
                    Label::Neutral
                };
                let lang = languages[rng.below(languages.len() as u64) as usize];
                Example::new(
                    format!("f{fixture}-{i:03}"),
                    label,
                    lang,
                    random_document(&mut rng, &oracle_lex),
                )
            })
            .collect();
        let bearing: BTreeSet<&str> = pool
            .iter()
            .filter(|e| oracle_bears(&e.text, &oracle_lex))
            .map(|e| e.id.as_str())
            .collect();
        // half the fixtures ask for most of the pool so bearing examples fit
        let size = if fixture % 2 == 0 {
            n - rng.below(n as u64 / 4) as usize
        } else {
            1 + rng.below(n as u64) as usize
        };
        let config = SamplingConfig::new(Method::Lexicon, size, rng.next_u64());
        let set =
            sample_lexicon_first_scoped(&pool, &oracle_lex, &config, &MatchScope::All).map_err(|e| e.to_string())?;
        let ids: BTreeSet<&str> = set.ids().collect();
        ensure(ids.len() == size, || {
            format!("fixture {fixture}: {} shots, expected {size}", ids.len())
        })?;
        if bearing.len() <= size {
            fit += 1;
            ensure(bearing.is_subset(&ids), || {
                format!("fixture {fixture}: bearing example missing")
            })?;
        } else {
            overflow += 1;
            ensure(ids.is_subset(&bearing), || {
                format!("fixture {fixture}: non-bearing example in overflow case")
            })?;
        }
    }
    ensure(fit > 0 && overflow > 0, || {
        format!("fixtures did not cover both cases ({fit}/{overflow})")
    })?;

    // (c) distribution table
    for (name, pool, want) in [("German", &de, (12, 10)), ("Hindi", &hi, (12, 9))] {
        let all = distribution_row("All", pool.iter(), &lexicon, &MatchScope::default());
        ensure((all.slurs, all.targets) == want, || {
            format!("{name} All: {}/{}", all.slurs, all.targets)
        })?;
        for size in [32, 64, 96] {
            let set = sample_lexicon_first(pool, &lexicon, &SamplingConfig::new(Method::Lexicon, size, 1))
                .map_err(|e| e.to_string())?;
            let row = distribution_row("Lexicon", set.examples(), &lexicon, &MatchScope::default());
            ensure((row.slurs, row.targets) == want, || {
                format!("{name} Lexicon{size}: {}/{}", row.slurs, row.targets)
            })?;
        }
    }
    let took = within(start, Duration::from_secs(10))?;
    Ok(format!(
        "20 seeds, 100 fixtures ({fit} fit, {overflow} overflow), S/T 12/10 and 12/9, {took:.0?}"
    ))
}

fn matching_oracle() -> Outcome {
    let lex = oracle_lexicon();
    ensure(lex.len() == 50, || format!("fixture has {} terms", lex.len()))?;
    let scripts: BTreeSet<bool> = lex.terms().iter().map(|t| t.surface.is_ascii()).collect();
    ensure(scripts.len() == 2, || "fixture must mix scripts".into())?;
    let mut rng = ShotRng::new(2024);
    let (mut mismatches, mut hits) = (0, 0);
    for _ in 0..1000 {
        let doc = random_document(&mut rng, &lex);
        let expected = oracle_matches(&doc, &lex, None);
        if impl_matches(&doc, &lex, None) != expected {
            mismatches += 1;
        }
        hits += expected.len();
    }
    ensure(mismatches == 0, || format!("{mismatches} mismatching documents"))?;
    Ok(format!("1000 documents, {hits} matches, 0 mismatches"))
}

fn close(a: f64, b: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure((a - b).abs() <= tol, || format!("{what}: {a} vs {b}"))
}

fn numeric() -> Outcome {
    let c = |u: &[f64], v: &[f64]| cosine(u, v).map_err(|e| e.to_string());
    close(c(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0])?, 1.0, 1e-9, "cosine identical")?;
    close(c(&[1.0, 0.0], &[0.0, 1.0])?, 0.0, 1e-9, "cosine orthogonal")?;
    close(c(&[1.0, 2.0, 2.0], &[2.0, 1.0, 2.0])?, 8.0 / 9.0, 1e-9, "cosine 8/9")?;

    let mut rng = ShotRng::new(5);
    let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    for i in 0..1000 {
        let dim = 1 + (unit() * 32.0) as usize;
        let u: Vec<f64> = (0..dim).map(|_| unit() * 2.0 - 1.0 + 1e-3).collect();
        let v: Vec<f64> = (0..dim).map(|_| unit() * 2.0 - 1.0 + 1e-3).collect();
        let (a, b) = (0.01 + unit() * 100.0, 0.01 + unit() * 100.0);
        let scaled_u: Vec<f64> = u.iter().map(|x| x * a).collect();
        let scaled_v: Vec<f64> = v.iter().map(|x| x * b).collect();
        close(c(&scaled_u, &scaled_v)?, c(&u, &v)?, 1e-9, &format!("scale pair {i}"))?;
    }

    let mean = word_vector(&[vec![1.0, 2.0, 3.0], vec![3.0, 2.0, 1.0]]).map_err(|e| e.to_string())?;
    ensure(mean == vec![2.0, 2.0, 2.0], || format!("word_vector gave {mean:?}"))?;

    let labels = ["HOF", "NOT", "OFF"];
    let mut rng = ShotRng::new(11);
    for i in 0..500 {
        let k = 2 + rng.below(2) as usize;
        let n = 1 + rng.below(60) as usize;
        let records: Vec<PredictionRecord> = (0..n)
            .map(|j| {
                PredictionRecord::new(
                    j.to_string(),
                    labels[rng.below(k as u64) as usize],
                    labels[rng.below(k as u64) as usize],
                )
            })
            .collect();
        let got = macro_scores(&records, &labels[..k]).map_err(|e| e.to_string())?;
        let (per, want) = confusion_oracle(&records, &labels[..k]);
        close(got.macro_f1, want, 1e-12, &format!("macro F1 instance {i}"))?;
        for (cls, (p, r, f)) in got.classes.iter().zip(per) {
            close(cls.precision, p, 1e-12, "precision")?;
            close(cls.recall, r, 1e-12, "recall")?;
            close(cls.f1, f, 1e-12, "class F1")?;
        }
    }

    let runs: Vec<MetricSummary> = [0.54, 0.55, 0.56]
        .iter()
        .map(|&f| {
            let mut s = macro_scores(&[PredictionRecord::new("x", "HOF", "HOF")], &["HOF"]).unwrap();
            s.macro_f1 = f;
            s
        })
        .collect();
    let agg = aggregate_seeds(&runs, StdKind::Sample).map_err(|e| e.to_string())?;
    close(agg.macro_f1, 0.55, 1e-12, "aggregate mean")?;
    close(agg.spread.as_ref().unwrap().macro_f1, 0.01, 1e-12, "aggregate std")?;
    ensure(agg.display_f1() == "0.55 (1.0)", || {
        format!("display {:?}", agg.display_f1())
    })?;
    Ok("cosine 1/0/8/9, 1000 scale pairs, word_vector (2,2,2), 500 F1 oracles, aggregate 0.55 (1.0)".into())
}

fn ablation_table() -> Outcome {
    let f = |n: &str| ablation_fixture(n).to_string_lossy().into_owned();
    let mut args: Vec<String> = vec!["eval-shots".into()];
    for (set, file) in [("Lexicon", "lexicon64"), ("Random", "random64"), ("All", "all")] {
        for (col, lang) in [("Germany", "de"), ("India", "hi")] {
            args.push("--shots".into());
            args.push(format!("{set}@{col}={}", f(&format!("{file}_{lang}.jsonl"))));
        }
    }
    args.extend(["--pred".into(), format!("Germany={}", f("pred_de.tsv"))]);
    args.extend(["--pred".into(), format!("India={}", f("pred_hi.tsv"))]);
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let (code, out) = cli(&refs);
    ensure(code == 0, || format!("eval-shots exited {code}"))?;
    let want = "\
Set      Germany  India
Lexicon     0.61   0.55
Random      0.56   0.53
All         0.51   0.53
";
    ensure(out == want, || format!("table was\n{out}"))?;
    Ok("Lexicon 0.61 / Random 0.56 / All 0.51 (Germany), 0.55 / 0.53 / 0.53 (India)".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("lexicon stats and declared totals", lexicon_table),
        ("word list annotation", annotation),
        ("sampler contract", sampler_contract),
        ("matching oracle equivalence", matching_oracle),
        ("numeric suite", numeric),
        ("shot prediction table", ablation_table),
    ];
    let mut failed = 0;
    let mut by_name = BTreeMap::new();
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match &outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
        by_name.insert(name, outcome.is_ok());
    }
    println!(
        "{} of {} criteria passed",
        by_name.values().filter(|ok| **ok).count(),
        by_name.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
