//! Query layer shared by the HTTP handlers and the `query` subcommand, so
//! both interfaces answer from the same code.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use semtrail::store::{CorpusData, ModelStore};
use semtrail::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Raw,
    Zscored,
}

impl Scale {
    pub fn parse(s: &str) -> Result<Self, QueryError> {
        match s {
            "raw" => Ok(Scale::Raw),
            "zscored" => Ok(Scale::Zscored),
            other => Err(QueryError::BadRequest(format!("scale must be raw or zscored, got {other:?}"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scale::Raw => "raw",
            Scale::Zscored => "zscored",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: i32,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub name: String,
    pub points: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ranked {
    pub word: String,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceRanking {
    pub x: i32,
    pub items: Vec<Ranked>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub scale: Scale,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub d: usize,
}

/// Uniform response envelope. `ranked` is set by `mostsimilar`, `contexts`
/// by `typicalcontext`; both are absent otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApiResponse {
    pub corpus: String,
    pub words: Vec<String>,
    pub curves: Vec<Curve>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranked: Option<Vec<Ranked>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contexts: Option<Vec<SliceRanking>>,
    pub meta: Meta,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceSummary {
    pub label: i32,
    pub start_year: i32,
    pub end_year: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub corpus_id: String,
    pub language: String,
    pub d: usize,
    pub slices: Vec<SliceSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QueryError {
    UnknownCorpus(String),
    UnknownWord(String),
    BadRequest(String),
    Internal(String),
}

impl QueryError {
    pub fn kind(&self) -> &'static str {
        match self {
            QueryError::UnknownCorpus(_) => "UnknownCorpus",
            QueryError::UnknownWord(_) => "UnknownWord",
            QueryError::BadRequest(_) => "BadRequest",
            QueryError::Internal(_) => "Internal",
        }
    }

    /// Process exit status for the `query` subcommand.
    pub fn exit_code(&self) -> i32 {
        match self {
            QueryError::UnknownWord(_) => 1,
            _ => 2,
        }
    }
}

impl std::fmt::Display for QueryError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QueryError::UnknownCorpus(c) => write!(f, "UnknownCorpus: {c}"),
            QueryError::UnknownWord(w) => write!(f, "UnknownWord: {w}"),
            QueryError::BadRequest(m) => write!(f, "BadRequest: {m}"),
            QueryError::Internal(m) => write!(f, "Internal: {m}"),
        }
    }
}

impl std::error::Error for QueryError {}

impl From<Error> for QueryError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownCorpus(c) => QueryError::UnknownCorpus(c),
            Error::UnknownWord(w) => QueryError::UnknownWord(w),
            other => QueryError::Internal(other.to_string()),
        }
    }
}

type QResult<T> = Result<T, QueryError>;

pub fn corpora(store: &ModelStore) -> Vec<CorpusSummary> {
    store
        .corpora()
        .map(|c| CorpusSummary {
            corpus_id: c.info.corpus_id.clone(),
            language: c.info.language.as_str().to_string(),
            d: c.dim(),
            slices: c
                .slices
                .values()
                .map(|s| SliceSummary {
                    label: s.slice.label_year,
                    start_year: s.slice.start_year,
                    end_year: s.slice.end_year,
                })
                .collect(),
        })
        .collect()
}

fn label(corpus: &CorpusData, slice_id: u32) -> i32 {
    corpus.slices[&slice_id].slice.label_year
}

fn points(corpus: &CorpusData, raw: impl IntoIterator<Item = (u32, f64)>) -> Vec<Point> {
    raw.into_iter()
        .filter(|(_, y)| y.is_finite())
        .map(|(sid, y)| Point { x: label(corpus, sid), y })
        .collect()
}

fn word_arg(corpus: &CorpusData, raw: &str) -> QResult<String> {
    let w = corpus.normalize(raw.trim());
    if w.is_empty() {
        return Err(QueryError::UnknownWord(raw.to_string()));
    }
    Ok(w)
}

fn k_arg(k: Option<usize>, default: usize) -> QResult<usize> {
    match k {
        Some(0) => Err(QueryError::BadRequest("k must be >= 1".into())),
        Some(k) => Ok(k),
        None => Ok(default),
    }
}

fn envelope(corpus: &CorpusData, words: Vec<String>, curves: Vec<Curve>, scale: Scale, k: Option<usize>) -> ApiResponse {
    ApiResponse {
        corpus: corpus.info.corpus_id.clone(),
        words,
        curves,
        ranked: None,
        contexts: None,
        meta: Meta {
            scale,
            k,
            d: corpus.dim(),
        },
    }
}

pub fn similarity(store: &ModelStore, corpus_id: &str, word1: &str, word2: &str) -> QResult<ApiResponse> {
    let corpus = store.corpus(corpus_id)?;
    let (w1, w2) = (word_arg(corpus, word1)?, word_arg(corpus, word2)?);
    let series = store.similarity_on_the_fly(corpus_id, &w1, &w2)?;
    let curve = Curve {
        name: w2.clone(),
        points: points(corpus, series.points),
    };
    Ok(envelope(corpus, vec![w1, w2], vec![curve], Scale::Raw, None))
}

pub fn emotion(store: &ModelStore, corpus_id: &str, word: &str, scale: Scale) -> QResult<ApiResponse> {
    let corpus = store.corpus(corpus_id)?;
    let w = word_arg(corpus, word)?;
    let series = store.emotion_series(corpus_id, &w)?;
    let curves = ["valence", "arousal", "dominance"]
        .iter()
        .enumerate()
        .map(|(dim, name)| {
            let raw: Vec<(u32, f64)> = match scale {
                Scale::Raw => series.points.iter().map(|(s, v)| (*s, v.to_array()[dim])).collect(),
                Scale::Zscored => series.display_points.iter().map(|(s, v)| (*s, v[dim])).collect(),
            };
            Curve {
                name: name.to_string(),
                points: points(corpus, raw),
            }
        })
        .collect();
    Ok(envelope(corpus, vec![w], curves, scale, None))
}

pub fn frequency(store: &ModelStore, corpus_id: &str, word: &str) -> QResult<ApiResponse> {
    let corpus = store.corpus(corpus_id)?;
    let w = word_arg(corpus, word)?;
    let series = store.frequency_series(corpus_id, &w)?;
    let curve = Curve {
        name: "frequency".into(),
        points: points(corpus, series.points),
    };
    Ok(envelope(corpus, vec![w], vec![curve], Scale::Raw, None))
}

pub fn typical_context(store: &ModelStore, corpus_id: &str, word: &str, k: Option<usize>) -> QResult<ApiResponse> {
    let corpus = store.corpus(corpus_id)?;
    let w = word_arg(corpus, word)?;
    let k = k_arg(k, corpus.info.params.contexts_k)?;
    let lists = store
        .typical_contexts(corpus_id, &w, k)?
        .into_iter()
        .map(|(sid, items)| SliceRanking {
            x: label(corpus, sid),
            items: items
                .into_iter()
                .filter(|(_, s)| s.is_finite())
                .map(|(word, score)| Ranked { word, score })
                .collect(),
        })
        .collect();
    let mut resp = envelope(corpus, vec![w], Vec::new(), Scale::Raw, Some(k));
    resp.contexts = Some(lists);
    Ok(resp)
}

pub fn most_similar(store: &ModelStore, corpus_id: &str, word: &str, k: Option<usize>) -> QResult<ApiResponse> {
    let corpus = store.corpus(corpus_id)?;
    let w = word_arg(corpus, word)?;
    let k = k_arg(k, corpus.info.params.top_k)?;
    let ranked = store
        .get_reference_words(corpus_id, &w, k)?
        .into_iter()
        .filter(|(_, s)| s.is_finite())
        .map(|(word, score)| Ranked { word, score })
        .collect();
    let mut resp = envelope(corpus, vec![w], Vec::new(), Scale::Raw, Some(k));
    resp.ranked = Some(ranked);
    Ok(resp)
}

/// Tab-separated rendering used by the `query` subcommand.
///
/// Single-curve answers print `label<TAB>value`; emotion prints
/// `label<TAB>V<TAB>A<TAB>D`; contexts print `label<TAB>word<TAB>ppmi`;
/// neighbors print `word<TAB>cosine`.
pub fn to_tsv(resp: &ApiResponse) -> String {
    let mut out = String::new();
    if let Some(ranked) = &resp.ranked {
        for r in ranked {
            writeln!(out, "{}\t{}", r.word, r.score).expect("string write");
        }
    } else if let Some(lists) = &resp.contexts {
        for list in lists {
            for r in &list.items {
                writeln!(out, "{}\t{}\t{}", list.x, r.word, r.score).expect("string write");
            }
        }
    } else if let Some(first) = resp.curves.first() {
        for (i, p) in first.points.iter().enumerate() {
            write!(out, "{}", p.x).expect("string write");
            for curve in &resp.curves {
                write!(out, "\t{}", curve.points[i].y).expect("string write");
            }
            out.push('\n');
        }
    }
    out
}
