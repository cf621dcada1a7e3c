//! Python bindings. Structured results (reports, summaries, term lists) are
//! returned as plain dicts and lists.

use std::collections::{BTreeMap, BTreeSet};

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;

use core::sampler::{complement_scoped, distribution_row, sample_lexicon_first_scoped};
use core::{
    ComplementConfig, ComplementMode, Label, MatchScope, Method, MetricSummary, PredictionRecord, ShiftMetric, StdKind,
};
use lexishot_core as core;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serde value to Python object via the stdlib json module.
fn to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_err)?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

fn from_py<T: serde::de::DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = PyModule::import(obj.py(), "json")?
        .call_method1("dumps", (obj,))?
        .extract()?;
    serde_json::from_str(&text).map_err(value_err)
}

/// `None` for the default scope, `"all"`, or a list of language codes.
fn scope_from(obj: Option<&Bound<'_, PyAny>>) -> PyResult<MatchScope> {
    let Some(obj) = obj else {
        return Ok(MatchScope::CountryOfLanguage);
    };
    if obj.is_none() {
        return Ok(MatchScope::CountryOfLanguage);
    }
    if let Ok(s) = obj.extract::<String>() {
        return match s.as_str() {
            "all" => Ok(MatchScope::All),
            "default" => Ok(MatchScope::CountryOfLanguage),
            other => Err(PyValueError::new_err(format!("unknown scope {other:?}"))),
        };
    }
    Ok(MatchScope::Languages(obj.extract::<BTreeSet<String>>()?))
}

fn label_from(s: &str) -> PyResult<Label> {
    s.parse::<Label>()
        .map_err(|_| PyValueError::new_err(format!("unknown label {s:?} (expected HOF or NOT)")))
}

#[pyclass(name = "Example", module = "lexishot_py")]
struct PyExample {
    inner: core::Example,
}

#[pymethods]
impl PyExample {
    #[new]
    fn new(id: String, label: &str, language: String, text: String) -> PyResult<Self> {
        Ok(Self {
            inner: core::Example::new(id, label_from(label)?, language, text),
        })
    }

    #[getter]
    fn id(&self) -> &str {
        &self.inner.id
    }

    #[getter]
    fn label(&self) -> &'static str {
        self.inner.label.as_str()
    }

    #[getter]
    fn language(&self) -> &str {
        &self.inner.language
    }

    #[getter]
    fn text(&self) -> &str {
        &self.inner.text
    }

    fn __repr__(&self) -> String {
        format!(
            "Example({:?}, {:?}, {:?})",
            self.inner.id,
            self.inner.label.as_str(),
            self.inner.language
        )
    }
}

fn examples(pool: &[PyRef<'_, PyExample>]) -> Vec<core::Example> {
    pool.iter().map(|e| e.inner.clone()).collect()
}

#[pyfunction]
fn parse_corpus(text: &str) -> PyResult<Vec<PyExample>> {
    Ok(core::parse_corpus(text)
        .map_err(value_err)?
        .into_iter()
        .map(|inner| PyExample { inner })
        .collect())
}

#[pyclass(name = "Lexicon", module = "lexishot_py")]
struct PyLexicon {
    inner: core::Lexicon,
}

#[pymethods]
impl PyLexicon {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: core::Lexicon::parse(text).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path)?;
        core::Lexicon::parse(&text)
            .map(|inner| Self { inner })
            .map_err(|e| PyValueError::new_err(format!("{}: {e}", path.display())))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn terms<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.terms())
    }

    fn countries(&self) -> Vec<String> {
        self.inner.countries().into_iter().map(String::from).collect()
    }

    fn languages(&self) -> Vec<String> {
        self.inner.languages().into_iter().map(String::from).collect()
    }

    fn to_tsv(&self) -> String {
        self.inner.to_tsv()
    }

    /// Per-country counts by type combination.
    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &core::compute_stats(&self.inner))
    }

    /// Countries whose computed totals differ from `declared`.
    fn validate<'py>(&self, py: Python<'py>, declared: BTreeMap<String, usize>) -> PyResult<Bound<'py, PyAny>> {
        let stats = core::compute_stats(&self.inner);
        to_py(py, &core::validate_against_declared(&stats, &declared))
    }

    #[pyo3(signature = (text, languages=None))]
    fn find_terms<'py>(
        &self,
        py: Python<'py>,
        text: &str,
        languages: Option<BTreeSet<String>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let hits: Vec<serde_json::Value> = core::find_terms(text, &self.inner, languages.as_ref())
            .into_iter()
            .map(|m| {
                serde_json::json!({
                    "surface": m.term.surface,
                    "country": m.term.country,
                    "language": m.term.language,
                    "types": m.term.types,
                    "start": m.start,
                    "end": m.end,
                    "text": m.matched_text,
                })
            })
            .collect();
        to_py(py, &hits)
    }

    #[pyo3(signature = (example, scope=None))]
    fn classify<'py>(
        &self,
        py: Python<'py>,
        example: PyRef<'_, PyExample>,
        scope: Option<&Bound<'_, PyAny>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let report = scope_from(scope)?.classify(&example.inner, &self.inner);
        to_py(py, &report.to_json())
    }

    fn annotate_words<'py>(&self, py: Python<'py>, words: Vec<String>, country: &str) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &core::annotate_words(&words, &self.inner, country))
    }
}

#[pyclass(name = "ShotSet", module = "lexishot_py")]
struct PyShotSet {
    inner: core::ShotSet,
}

#[pymethods]
impl PyShotSet {
    #[staticmethod]
    fn from_jsonl(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: core::ShotSet::from_jsonl(text).map_err(value_err)?,
        })
    }

    #[pyo3(signature = (timestamp=None))]
    fn to_jsonl(&self, timestamp: Option<&str>) -> String {
        self.inner.to_jsonl(timestamp)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn ids(&self) -> Vec<String> {
        self.inner.ids().map(String::from).collect()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.config.set_name()
    }

    #[getter]
    fn shortfall(&self) -> usize {
        self.inner.shortfall
    }

    #[getter]
    fn config<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.config)
    }

    /// One dict per shot: id, label, language, text, origin, matched_terms.
    fn shots<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let rows: Vec<serde_json::Value> = self
            .inner
            .shots
            .iter()
            .map(|s| {
                serde_json::json!({
                    "id": s.example.id,
                    "label": s.example.label,
                    "language": s.example.language,
                    "text": s.example.text,
                    "origin": s.origin,
                    "matched_terms": s.matched_terms,
                })
            })
            .collect();
        to_py(py, &rows)
    }

    fn examples(&self) -> Vec<PyExample> {
        self.inner.examples().map(|e| PyExample { inner: e.clone() }).collect()
    }
}

/// Draws a shot set. `method` is "random" or "lexicon"; the latter needs a lexicon.
#[pyfunction]
#[pyo3(signature = (pool, method, size, seed, lexicon=None, scope=None))]
fn sample(
    pool: Vec<PyRef<'_, PyExample>>,
    method: &str,
    size: usize,
    seed: u64,
    lexicon: Option<PyRef<'_, PyLexicon>>,
    scope: Option<&Bound<'_, PyAny>>,
) -> PyResult<PyShotSet> {
    let pool = examples(&pool);
    let scope = scope_from(scope)?;
    let inner = match (method, lexicon) {
        ("random", lex) => {
            let mut set = core::sample_random(&pool, &core::SamplingConfig::new(Method::Random, size, seed))
                .map_err(value_err)?;
            if let Some(lex) = lex {
                set.annotate(&lex.inner, &scope);
            }
            set
        }
        ("lexicon", Some(lex)) => {
            let config = core::SamplingConfig::new(Method::Lexicon, size, seed);
            sample_lexicon_first_scoped(&pool, &lex.inner, &config, &scope).map_err(value_err)?
        }
        ("lexicon", None) => return Err(PyValueError::new_err("lexicon sampling needs a lexicon")),
        (other, _) => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    };
    Ok(PyShotSet { inner })
}

/// Complements `base` with `size` more examples; `mode` is "+l" or "+r".
#[pyfunction]
#[pyo3(signature = (base, pool, lexicon, mode, size, seed, scope=None))]
fn complement(
    base: PyRef<'_, PyShotSet>,
    pool: Vec<PyRef<'_, PyExample>>,
    lexicon: PyRef<'_, PyLexicon>,
    mode: &str,
    size: usize,
    seed: u64,
    scope: Option<&Bound<'_, PyAny>>,
) -> PyResult<PyShotSet> {
    let mode = match mode {
        "+l" | "l" => ComplementMode::PlusL,
        "+r" | "r" => ComplementMode::PlusR,
        other => return Err(PyValueError::new_err(format!("unknown complement mode {other:?}"))),
    };
    let config = ComplementConfig { mode, size, seed };
    let inner = complement_scoped(
        &base.inner,
        &examples(&pool),
        &lexicon.inner,
        &config,
        &scope_from(scope)?,
    )
    .map_err(value_err)?;
    Ok(PyShotSet { inner })
}

/// Distinct slur and target terms per named set.
#[pyfunction]
#[pyo3(signature = (sets, lexicon, scope=None))]
fn distribution<'py>(
    py: Python<'py>,
    sets: Vec<(String, PyRef<'_, PyShotSet>)>,
    lexicon: PyRef<'_, PyLexicon>,
    scope: Option<&Bound<'_, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let scope = scope_from(scope)?;
    let rows: Vec<_> = sets
        .iter()
        .map(|(name, set)| distribution_row(name, set.inner.examples(), &lexicon.inner, &scope))
        .collect();
    to_py(py, &rows)
}

#[pyclass(name = "EmbeddingTable", module = "lexishot_py")]
struct PyEmbeddingTable {
    inner: core::EmbeddingTable,
}

#[pymethods]
impl PyEmbeddingTable {
    #[new]
    #[pyo3(signature = (vectors, metadata=None))]
    fn new(vectors: BTreeMap<String, Vec<f64>>, metadata: Option<BTreeMap<String, String>>) -> PyResult<Self> {
        let dim = vectors.values().next().map_or(0, Vec::len);
        let mut inner = core::EmbeddingTable::new(dim);
        for (k, v) in vectors {
            inner.insert(k, v).map_err(value_err)?;
        }
        inner.metadata = metadata.unwrap_or_default();
        Ok(Self { inner })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: core::EmbeddingTable::parse(text).map_err(value_err)?,
        })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    #[getter]
    fn metadata(&self) -> BTreeMap<String, String> {
        self.inner.metadata.clone()
    }

    fn keys(&self) -> Vec<String> {
        self.inner.keys().map(String::from).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __getitem__(&self, key: &str) -> PyResult<Vec<f64>> {
        self.inner
            .get(key)
            .map(<[f64]>::to_vec)
            .ok_or_else(|| PyKeyError::new_err(key.to_string()))
    }
}

#[pyfunction]
fn cosine(u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
    core::cosine(&u, &v).map_err(value_err)
}

/// Mean of a word's token vectors.
#[pyfunction]
fn word_vector(tokens: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    core::word_vector(&tokens).map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (before, after, groups, metric="cosine"))]
fn shift_report<'py>(
    py: Python<'py>,
    before: PyRef<'_, PyEmbeddingTable>,
    after: PyRef<'_, PyEmbeddingTable>,
    groups: BTreeMap<String, Vec<String>>,
    metric: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let metric = match metric {
        "cosine" => ShiftMetric::Cosine,
        "distance" => ShiftMetric::Distance,
        other => return Err(PyValueError::new_err(format!("unknown metric {other:?}"))),
    };
    let report = core::shift_report(&before.inner, &after.inner, &groups, metric).map_err(value_err)?;
    to_py(py, &report)
}

/// Macro scores over `(id, gold, predicted)` triples.
#[pyfunction]
#[pyo3(signature = (records, labels=vec!["HOF".to_string(), "NOT".to_string()]))]
fn macro_scores<'py>(
    py: Python<'py>,
    records: Vec<(String, String, String)>,
    labels: Vec<String>,
) -> PyResult<Bound<'py, PyAny>> {
    let records: Vec<PredictionRecord> = records
        .into_iter()
        .map(|(id, g, p)| PredictionRecord::new(id, g, p))
        .collect();
    to_py(py, &core::macro_scores(&records, &labels).map_err(value_err)?)
}

/// Mean and standard deviation over summaries returned by `macro_scores`.
#[pyfunction]
#[pyo3(signature = (summaries, std="sample"))]
fn aggregate_seeds<'py>(py: Python<'py>, summaries: &Bound<'py, PyAny>, std: &str) -> PyResult<Bound<'py, PyAny>> {
    let kind = match std {
        "sample" => StdKind::Sample,
        "population" => StdKind::Population,
        other => return Err(PyValueError::new_err(format!("unknown std kind {other:?}"))),
    };
    let summaries: Vec<MetricSummary> = from_py(summaries)?;
    let agg = core::aggregate_seeds(&summaries, kind).map_err(value_err)?;
    let mut value = serde_json::to_value(&agg).map_err(value_err)?;
    value["display"] = agg.display_f1().into();
    to_py(py, &value)
}

#[pymodule]
fn lexishot_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyExample>()?;
    m.add_class::<PyLexicon>()?;
    m.add_class::<PyShotSet>()?;
    m.add_class::<PyEmbeddingTable>()?;
    m.add_function(wrap_pyfunction!(parse_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(complement, m)?)?;
    m.add_function(wrap_pyfunction!(distribution, m)?)?;
    m.add_function(wrap_pyfunction!(cosine, m)?)?;
    m.add_function(wrap_pyfunction!(word_vector, m)?)?;
    m.add_function(wrap_pyfunction!(shift_report, m)?)?;
    m.add_function(wrap_pyfunction!(macro_scores, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate_seeds, m)?)?;
    Ok(())
}
