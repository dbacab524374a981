//! End-to-end build: slice, normalize, count, factor, induce, cache, store.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::cooc::{count_cooccurrences, typical_context_ids, DEFAULT_WINDOW};
use crate::corpus::{build_vocabulary_from_documents, Corpus, CorpusManifest, TimeSlice, Tokenizer, DEFAULT_STRIP_PATTERN};
use crate::embed::{all_top_k, ppmi, randomized_svd, CsrMatrix, EmbeddingModel, SvdOptions, DEFAULT_ALPHA, DEFAULT_DIM, DEFAULT_EIG_WEIGHT};
use crate::emotion::{induce_lexicon, SeedLexicon, DEFAULT_MIN_SEED_SIM};
use crate::error::{Error, Result};
use crate::par::*;
use crate::store::{CorpusInfo, CorpusParams, ModelStore, SliceArtifacts, StoreWriter, DEFAULT_CONTEXTS_K, DEFAULT_TOP_K};

pub const DEFAULT_MIN_COUNT: u64 = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSource {
    pub manifest: PathBuf,
    pub seeds: PathBuf,
}

fn d_window() -> usize {
    DEFAULT_WINDOW
}
fn d_min_count() -> u64 {
    DEFAULT_MIN_COUNT
}
fn d_dim() -> usize {
    DEFAULT_DIM
}
fn d_alpha() -> f64 {
    DEFAULT_ALPHA
}
fn d_eig() -> f64 {
    DEFAULT_EIG_WEIGHT
}
fn d_top_k() -> usize {
    DEFAULT_TOP_K
}
fn d_contexts_k() -> usize {
    DEFAULT_CONTEXTS_K
}
fn d_min_seed_sim() -> f64 {
    DEFAULT_MIN_SEED_SIM
}
fn d_strip() -> String {
    DEFAULT_STRIP_PATTERN.to_string()
}

/// Every tunable of a build. Loaded from TOML; unset keys take defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub manifest: Option<PathBuf>,
    #[serde(default)]
    pub seeds: Option<PathBuf>,
    #[serde(default)]
    pub corpora: Vec<CorpusSource>,
    #[serde(default)]
    pub store: Option<PathBuf>,
    #[serde(default = "d_window")]
    pub window: usize,
    #[serde(default = "d_min_count")]
    pub min_count: u64,
    #[serde(default = "d_dim")]
    pub dim: usize,
    #[serde(default = "d_alpha")]
    pub alpha: f64,
    #[serde(default = "d_eig")]
    pub eig_weight: f64,
    #[serde(default)]
    pub svd_seed: u64,
    #[serde(default = "d_top_k")]
    pub top_k: usize,
    #[serde(default = "d_contexts_k")]
    pub contexts_k: usize,
    #[serde(default = "d_min_seed_sim")]
    pub min_seed_sim: f64,
    #[serde(default = "d_strip")]
    pub strip_pattern: String,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        toml::from_str("").expect("all fields default")
    }
}

impl PipelineConfig {
    /// Reads a TOML config; relative paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let mut cfg: PipelineConfig =
            toml::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.manifest.as_mut().map(resolve);
        cfg.seeds.as_mut().map(resolve);
        cfg.store.as_mut().map(resolve);
        for src in &mut cfg.corpora {
            resolve(&mut src.manifest);
            resolve(&mut src.seeds);
        }
        Ok(cfg)
    }

    pub fn sources(&self) -> Result<Vec<CorpusSource>> {
        let mut out = Vec::new();
        match (&self.manifest, &self.seeds) {
            (Some(manifest), Some(seeds)) => out.push(CorpusSource {
                manifest: manifest.clone(),
                seeds: seeds.clone(),
            }),
            (None, None) => {}
            _ => {
                return Err(Error::InvalidConfig(
                    "manifest and seeds must be given together".into(),
                ))
            }
        }
        out.extend(self.corpora.iter().cloned());
        if out.is_empty() {
            return Err(Error::InvalidConfig("no corpus configured".into()));
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.window == 0 {
            return bad("window must be >= 1".into());
        }
        if self.min_count == 0 {
            return bad("min_count must be >= 1".into());
        }
        if self.dim == 0 {
            return bad("dim must be >= 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha {} outside (0, 1]", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.eig_weight) {
            return bad(format!("eig_weight {} outside [0, 1]", self.eig_weight));
        }
        if self.top_k == 0 || self.contexts_k == 0 {
            return bad("top_k and contexts_k must be >= 1".into());
        }
        if !(-1.0..1.0).contains(&self.min_seed_sim) {
            return bad(format!("min_seed_sim {} outside [-1, 1)", self.min_seed_sim));
        }
        Ok(())
    }

    pub fn params(&self) -> CorpusParams {
        CorpusParams {
            window: self.window,
            min_count: self.min_count,
            dim: self.dim,
            alpha: self.alpha,
            eig_weight: self.eig_weight,
            svd_seed: self.svd_seed,
            top_k: self.top_k,
            contexts_k: self.contexts_k,
            min_seed_sim: self.min_seed_sim,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Config,
    Load,
    Slice,
    Vocabulary,
    Cooccurrence,
    Ppmi,
    Svd,
    Emotion,
    TopK,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Config => "config",
            Stage::Load => "load",
            Stage::Slice => "slice",
            Stage::Vocabulary => "vocabulary",
            Stage::Cooccurrence => "cooccurrence",
            Stage::Ppmi => "ppmi",
            Stage::Svd => "svd",
            Stage::Emotion => "emotion",
            Stage::TopK => "top-k",
            Stage::Write => "write",
        };
        f.write_str(name)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{stage} stage failed{}: {source}", context.as_ref().map(|c| format!(" ({c})")).unwrap_or_default())]
pub struct BuildError {
    pub stage: Stage,
    pub context: Option<String>,
    #[source]
    pub source: Error,
}

impl BuildError {
    fn at(stage: Stage, context: impl Into<Option<String>>) -> impl FnOnce(Error) -> BuildError {
        let context = context.into();
        move |source| BuildError { stage, context, source }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SliceReport {
    pub corpus_id: String,
    pub slice: TimeSlice,
    pub vocabulary: usize,
    pub cooc_nnz: usize,
    pub ppmi_nnz: usize,
    pub singular_value_head: Vec<f64>,
    pub power_iters: usize,
    pub emotions: usize,
    pub checksum: String,
    pub timings: Vec<(Stage, Duration)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BuildReport {
    pub corpora: Vec<(String, Duration)>,
    pub slices: Vec<SliceReport>,
}

impl fmt::Display for BuildReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (corpus, load) in &self.corpora {
            writeln!(f, "[{corpus}] load {:.3}s", load.as_secs_f64())?;
        }
        for r in &self.slices {
            write!(
                f,
                "[{}] slice {} {}-{}: tokens={} vocab={} cooc_nnz={} ppmi_nnz={} emotions={} sv_head=[",
                r.corpus_id,
                r.slice.slice_id,
                r.slice.start_year,
                r.slice.end_year,
                r.slice.token_count,
                r.vocabulary,
                r.cooc_nnz,
                r.ppmi_nnz,
                r.emotions,
            )?;
            for (i, s) in r.singular_value_head.iter().enumerate() {
                write!(f, "{}{s:.4}", if i > 0 { ", " } else { "" })?;
            }
            write!(f, "] power_iters={}", r.power_iters)?;
            for (stage, t) in &r.timings {
                write!(f, " {stage}={:.3}s", t.as_secs_f64())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

struct Timer(Instant);

impl Timer {
    fn start() -> Self {
        Timer(Instant::now())
    }
    fn lap(&mut self) -> Duration {
        let now = Instant::now();
        let d = now - self.0;
        self.0 = now;
        d
    }
}

fn build_slice(
    corpus: &Corpus,
    slice: &TimeSlice,
    seeds: &SeedLexicon,
    cfg: &PipelineConfig,
    writer: &StoreWriter,
) -> std::result::Result<SliceReport, BuildError> {
    let corpus_id = corpus.manifest.corpus_id.clone();
    let ctx = Some(format!("{corpus_id} slice {} {}-{}", slice.slice_id, slice.start_year, slice.end_year));
    let mut timer = Timer::start();
    let mut timings = Vec::new();

    let docs = corpus.documents_in(slice);
    let vocab = build_vocabulary_from_documents(&docs, cfg.min_count).map_err(BuildError::at(Stage::Vocabulary, ctx.clone()))?;
    timings.push((Stage::Vocabulary, timer.lap()));

    let token_slices: Vec<&[String]> = docs.iter().map(|d| d.tokens.as_slice()).collect();
    let cooc = count_cooccurrences(&token_slices, &vocab, cfg.window);
    timings.push((Stage::Cooccurrence, timer.lap()));

    let matrix = ppmi(&cooc, cfg.alpha).map_err(BuildError::at(Stage::Ppmi, ctx.clone()))?;
    timings.push((Stage::Ppmi, timer.lap()));

    let opts = SvdOptions::with_seed(cfg.svd_seed);
    let factors = randomized_svd(&CsrMatrix::from(&matrix), cfg.dim, &opts).map_err(BuildError::at(Stage::Svd, ctx.clone()))?;
    let model = EmbeddingModel::from_factors(slice.slice_id, vocab, &factors, cfg.eig_weight, cfg.svd_seed)
        .map_err(BuildError::at(Stage::Svd, ctx.clone()))?;
    timings.push((Stage::Svd, timer.lap()));

    let targets: Vec<String> = model.vocab().words().to_vec();
    let induced = induce_lexicon(std::slice::from_ref(&model), seeds, &targets, cfg.min_seed_sim);
    let emotions: BTreeMap<u32, _> = induced
        .into_iter()
        .map(|((_, w), s)| (model.vocab().id(&w).expect("target from vocabulary"), s))
        .collect();
    timings.push((Stage::Emotion, timer.lap()));

    let top_similar = all_top_k(&model, cfg.top_k);
    let contexts: Vec<Vec<(u32, f64)>> = (0..model.len() as u32)
        .into_par_iter()
        .map(|id| typical_context_ids(id, model.vocab(), &matrix, cfg.contexts_k))
        .collect();
    timings.push((Stage::TopK, timer.lap()));

    let report_base = SliceReport {
        corpus_id: corpus_id.clone(),
        slice: slice.clone(),
        vocabulary: model.len(),
        cooc_nnz: cooc.nnz(),
        ppmi_nnz: matrix.nnz(),
        singular_value_head: model.singular_values.iter().take(5).copied().collect(),
        power_iters: factors.power_iters,
        emotions: emotions.len(),
        checksum: String::new(),
        timings: Vec::new(),
    };
    log::info!(
        "{corpus_id} slice {}: vocab={} nnz={} sv_head={:?}",
        slice.slice_id,
        report_base.vocabulary,
        report_base.ppmi_nnz,
        report_base.singular_value_head
    );

    let artifacts = SliceArtifacts::from_model(slice.clone(), &model, emotions, top_similar, contexts);
    let receipt = writer
        .write_slice(&corpus_id, artifacts)
        .map_err(BuildError::at(Stage::Write, ctx))?;
    timings.push((Stage::Write, timer.lap()));

    Ok(SliceReport {
        checksum: receipt.checksum,
        timings,
        ..report_base
    })
}

/// Runs the whole pipeline for every configured corpus, returning the
/// in-memory store. Slices are processed in parallel; each slice's stage
/// chain is sequential.
pub fn run_build(cfg: &PipelineConfig, only_corpus: Option<&str>) -> std::result::Result<(ModelStore, BuildReport), BuildError> {
    cfg.validate().map_err(BuildError::at(Stage::Config, None))?;
    let tokenizer = Tokenizer::new(&cfg.strip_pattern).map_err(BuildError::at(Stage::Config, None))?;
    let sources = cfg.sources().map_err(BuildError::at(Stage::Config, None))?;

    let writer = StoreWriter::new();
    let mut report = BuildReport::default();
    let mut seen_ids = Vec::new();

    for source in sources {
        let ctx = Some(source.manifest.display().to_string());
        let mut timer = Timer::start();
        let manifest = CorpusManifest::load(&source.manifest).map_err(BuildError::at(Stage::Load, ctx.clone()))?;
        if only_corpus.is_some_and(|id| id != manifest.corpus_id) {
            continue;
        }
        if seen_ids.contains(&manifest.corpus_id) {
            return Err(BuildError::at(Stage::Load, ctx)(Error::InvalidManifest(format!(
                "duplicate corpus_id {}",
                manifest.corpus_id
            ))));
        }
        seen_ids.push(manifest.corpus_id.clone());

        let corpus = Corpus::load(manifest, &tokenizer).map_err(|e| {
            let stage = match e {
                Error::InfeasibleSlicing(_) | Error::EmptyCorpus => Stage::Slice,
                _ => Stage::Load,
            };
            BuildError::at(stage, ctx.clone())(e)
        })?;
        let seeds = SeedLexicon::load(corpus.manifest.language, &source.seeds)
            .map_err(BuildError::at(Stage::Load, Some(source.seeds.display().to_string())))?
            .normalized(corpus.lemmas.as_ref());

        let info = CorpusInfo {
            corpus_id: corpus.manifest.corpus_id.clone(),
            language: corpus.manifest.language,
            params: cfg.params(),
        };
        writer
            .register_corpus(info, corpus.lemmas.clone().unwrap_or_default())
            .map_err(BuildError::at(Stage::Write, ctx.clone()))?;
        report.corpora.push((corpus.manifest.corpus_id.clone(), timer.lap()));

        let slice_reports = corpus
            .slices
            .par_iter()
            .map(|slice| build_slice(&corpus, slice, &seeds, cfg, &writer))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        report.slices.extend(slice_reports);
    }

    if let Some(id) = only_corpus {
        if !seen_ids.iter().any(|s| s == id) {
            return Err(BuildError::at(Stage::Config, None)(Error::UnknownCorpus(id.to_string())));
        }
    }
    Ok((writer.into_store(), report))
}
