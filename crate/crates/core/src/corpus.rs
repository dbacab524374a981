//! Corpus ingestion: manifests, token normalization, temporal slicing and
//! per-slice vocabularies.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::*;

pub const MIN_DOCUMENT_YEAR: i32 = 1000;
pub const MAX_DOCUMENT_YEAR: i32 = 2100;

/// Default punctuation/symbol class removed before whitespace splitting.
pub const DEFAULT_STRIP_PATTERN: &str = r"[\p{P}\p{S}]+";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    English,
    German,
}

impl Language {
    pub fn as_str(self) -> &'static str {
        match self {
            Language::English => "english",
            Language::German => "german",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "english" => Some(Language::English),
            "german" => Some(Language::German),
            _ => None,
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Surface form to lemma lookup used for German normalization.
///
/// Keys and values are lowercased on construction and chains are resolved
/// to their fixpoint, so `lookup(lookup(x)) == lookup(x)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LemmaTable {
    map: BTreeMap<String, String>,
}

impl LemmaTable {
    pub fn from_pairs<I, S, T>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let mut raw = BTreeMap::new();
        for (surface, lemma) in pairs {
            let surface = surface.as_ref().trim().to_lowercase();
            let lemma = lemma.as_ref().trim().to_lowercase();
            if surface.is_empty() || lemma.is_empty() {
                return Err(Error::InvalidLexicon("empty lemma table field".into()));
            }
            raw.insert(surface, lemma);
        }

        let mut map = BTreeMap::new();
        for surface in raw.keys() {
            let mut current = surface;
            let mut hops = 0;
            while let Some(next) = raw.get(current) {
                if next == current {
                    break;
                }
                current = next;
                hops += 1;
                if hops > raw.len() {
                    return Err(Error::InvalidLexicon(format!(
                        "lemma table has a cycle through {surface:?}"
                    )));
                }
            }
            if current != surface {
                map.insert(surface.clone(), current.clone());
            }
        }
        Ok(LemmaTable { map })
    }

    /// Reads a headerless two-column TSV (`surface<TAB>lemma`).
    pub fn load_tsv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            match (cols.next(), cols.next(), cols.next()) {
                (Some(s), Some(l), None) => pairs.push((s.to_string(), l.to_string())),
                _ => {
                    return Err(Error::InvalidLexicon(format!(
                        "{}:{}: expected two tab-separated columns",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        Self::from_pairs(pairs)
    }

    pub fn lookup<'a>(&'a self, word: &'a str) -> &'a str {
        self.map.get(word).map(String::as_str).unwrap_or(word)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// Orthographic normalization: lowercasing for English, lowercasing plus
/// lemma lookup for German.
pub fn normalize_token(raw: &str, language: Language, lemmas: Option<&LemmaTable>) -> String {
    let lower = raw.to_lowercase();
    match (language, lemmas) {
        (Language::German, Some(table)) => table.lookup(&lower).to_string(),
        _ => lower,
    }
}

/// Punctuation stripping followed by whitespace splitting.
#[derive(Clone, Debug)]
pub struct Tokenizer {
    strip: Regex,
}

impl Tokenizer {
    pub fn new(strip_pattern: &str) -> Result<Self> {
        let strip = Regex::new(strip_pattern)
            .map_err(|e| Error::InvalidConfig(format!("strip pattern: {e}")))?;
        Ok(Tokenizer { strip })
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let stripped = self.strip.replace_all(text, " ");
        stripped.split_whitespace().map(str::to_string).collect()
    }
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer::new(DEFAULT_STRIP_PATTERN).expect("default pattern compiles")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlicingMode {
    FixedSpan,
    Balanced,
}

fn default_min_span() -> i32 {
    10
}

fn default_max_span() -> i32 {
    50
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlicingConfig {
    pub mode: SlicingMode,
    #[serde(default)]
    pub span_years: Option<i32>,
    #[serde(default)]
    pub target_slices: Option<usize>,
    #[serde(default = "default_min_span")]
    pub min_span_years: i32,
    #[serde(default = "default_max_span")]
    pub max_span_years: i32,
}

impl SlicingConfig {
    pub fn fixed(span_years: i32) -> Self {
        SlicingConfig {
            mode: SlicingMode::FixedSpan,
            span_years: Some(span_years),
            target_slices: None,
            min_span_years: default_min_span(),
            max_span_years: default_max_span(),
        }
    }

    pub fn balanced(target_slices: usize) -> Self {
        SlicingConfig {
            mode: SlicingMode::Balanced,
            span_years: None,
            target_slices: Some(target_slices),
            min_span_years: default_min_span(),
            max_span_years: default_max_span(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.min_span_years < 1 || self.min_span_years > self.max_span_years {
            return Err(Error::InvalidConfig(format!(
                "slice span bounds [{}, {}] are not a valid range",
                self.min_span_years, self.max_span_years
            )));
        }
        match self.mode {
            SlicingMode::FixedSpan => match self.span_years {
                Some(span) if (self.min_span_years..=self.max_span_years).contains(&span) => Ok(()),
                Some(span) => Err(Error::InvalidConfig(format!(
                    "span_years {span} outside [{}, {}]",
                    self.min_span_years, self.max_span_years
                ))),
                None => Err(Error::InvalidConfig(
                    "fixed_span slicing requires span_years".into(),
                )),
            },
            SlicingMode::Balanced => match self.target_slices {
                Some(n) if n >= 1 => Ok(()),
                _ => Err(Error::InvalidConfig(
                    "balanced slicing requires target_slices >= 1".into(),
                )),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestDocument {
    pub year: i32,
    pub path: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusManifest {
    pub corpus_id: String,
    pub language: Language,
    pub slicing: SlicingConfig,
    #[serde(default)]
    pub lemma_table: Option<PathBuf>,
    #[serde(default)]
    pub documents: Vec<ManifestDocument>,
}

impl CorpusManifest {
    /// Parses a TOML manifest. Relative document and lemma table paths are
    /// resolved against the manifest's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let mut manifest: CorpusManifest = toml::from_str(&text)
            .map_err(|e| Error::InvalidManifest(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for doc in &mut manifest.documents {
            if doc.path.is_relative() {
                doc.path = base.join(&doc.path);
            }
        }
        if let Some(table) = manifest.lemma_table.as_mut() {
            if table.is_relative() {
                *table = base.join(&*table);
            }
        }
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<()> {
        if self.corpus_id.trim().is_empty() {
            return Err(Error::InvalidManifest("corpus_id is empty".into()));
        }
        if self.language == Language::English && self.lemma_table.is_some() {
            return Err(Error::InvalidManifest(
                "english manifests must not carry a lemma table".into(),
            ));
        }
        for doc in &self.documents {
            if !(MIN_DOCUMENT_YEAR..=MAX_DOCUMENT_YEAR).contains(&doc.year) {
                return Err(Error::InvalidManifest(format!(
                    "document {} has year {} outside [{MIN_DOCUMENT_YEAR}, {MAX_DOCUMENT_YEAR}]",
                    doc.path.display(),
                    doc.year
                )));
            }
        }
        self.slicing.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeSlice {
    pub slice_id: u32,
    /// Start year; the x-axis value of every series.
    pub label_year: i32,
    pub start_year: i32,
    pub end_year: i32,
    pub token_count: u64,
}

impl TimeSlice {
    pub fn contains(&self, year: i32) -> bool {
        (self.start_year..=self.end_year).contains(&year)
    }

    pub fn span_years(&self) -> i32 {
        self.end_year - self.start_year + 1
    }
}

/// Year and normalized token count of one document, the input to slicing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DocumentMass {
    pub year: i32,
    pub tokens: u64,
}

/// Partitions `[min_year, max_year]` into contiguous slices.
///
/// Balanced mode sweeps the years in order, closing a slice once it holds at
/// least `total / target_slices` tokens and closing early when the span would
/// exceed the upper bound. A trailing slice shorter than the lower bound is
/// merged into its predecessor when the merged span stays within bounds.
pub fn build_slices(slicing: &SlicingConfig, documents: &[DocumentMass]) -> Result<Vec<TimeSlice>> {
    if documents.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    slicing.validate()?;

    let mut per_year: BTreeMap<i32, u64> = BTreeMap::new();
    for doc in documents {
        *per_year.entry(doc.year).or_default() += doc.tokens;
    }
    let years: Vec<(i32, u64)> = per_year.into_iter().collect();

    let spans = match slicing.mode {
        SlicingMode::FixedSpan => fixed_spans(slicing, &years)?,
        SlicingMode::Balanced => balanced_spans(slicing, &years)?,
    };

    Ok(spans
        .into_iter()
        .enumerate()
        .map(|(i, (start, end))| TimeSlice {
            slice_id: i as u32,
            label_year: start,
            start_year: start,
            end_year: end,
            token_count: years
                .iter()
                .filter(|(y, _)| (start..=end).contains(y))
                .map(|(_, m)| m)
                .sum(),
        })
        .collect())
}

fn fixed_spans(slicing: &SlicingConfig, years: &[(i32, u64)]) -> Result<Vec<(i32, i32)>> {
    let span = slicing.span_years.expect("validated");
    let first = years[0].0;
    let last = years[years.len() - 1].0;
    let mut spans = Vec::new();
    let mut start = first;
    while start <= last {
        let end = (start + span - 1).min(last);
        if !years.iter().any(|(y, _)| (start..=end).contains(y)) {
            return Err(Error::InfeasibleSlicing(format!(
                "no documents in {start}-{end}"
            )));
        }
        spans.push((start, end));
        start = end + 1;
    }
    Ok(spans)
}

fn balanced_spans(slicing: &SlicingConfig, years: &[(i32, u64)]) -> Result<Vec<(i32, i32)>> {
    let target = slicing.target_slices.expect("validated");
    let (min_span, max_span) = (slicing.min_span_years, slicing.max_span_years);
    let total: u64 = years.iter().map(|(_, m)| m).sum();
    let threshold = total as f64 / target as f64;
    let last_year = years[years.len() - 1].0;

    let mut spans: Vec<(i32, i32)> = Vec::new();
    let mut start = years[0].0;
    let mut acc: u64 = 0;
    let mut closed_by_mass = 0usize;

    for (i, &(year, mass)) in years.iter().enumerate() {
        if acc > 0 && year - start + 1 > max_span {
            let end = (year - 1).min(start + max_span - 1);
            spans.push((start, end));
            start = end + 1;
            acc = 0;
            if year - start + 1 > max_span {
                return Err(Error::InfeasibleSlicing(format!(
                    "no documents between {start} and {year} within the {max_span}-year bound"
                )));
            }
        }
        acc += mass;

        let Some(&(next, _)) = years.get(i + 1) else {
            break;
        };
        let wants_close = closed_by_mass + 1 < target && acc as f64 >= threshold;
        if wants_close && next - start >= min_span {
            let end = (next - 1).min(start + max_span - 1);
            spans.push((start, end));
            closed_by_mass += 1;
            start = end + 1;
            acc = 0;
            if next - start + 1 > max_span {
                return Err(Error::InfeasibleSlicing(format!(
                    "no documents between {start} and {next} within the {max_span}-year bound"
                )));
            }
        }
    }
    spans.push((start, last_year));

    if spans.len() >= 2 {
        let (tail_start, tail_end) = spans[spans.len() - 1];
        let (prev_start, _) = spans[spans.len() - 2];
        if tail_end - tail_start + 1 < min_span && tail_end - prev_start + 1 <= max_span {
            spans.pop();
            let prev = spans.last_mut().expect("len >= 2");
            prev.1 = tail_end;
        }
    }
    Ok(spans)
}

/// Word/id interning for one slice, restricted to words with at least
/// `min_count` occurrences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
    min_count: u64,
}

impl Vocabulary {
    /// Ids are assigned by descending count, ties broken lexicographically.
    pub fn from_counts(counts: HashMap<String, u64>, min_count: u64) -> Result<Self> {
        let min_count = min_count.max(1);
        let mut kept: Vec<(String, u64)> = counts.into_iter().filter(|(_, c)| *c >= min_count).collect();
        if kept.is_empty() {
            return Err(Error::EmptyVocabulary { min_count });
        }
        kept.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let (words, counts): (Vec<String>, Vec<u64>) = kept.into_iter().unzip();
        Ok(Self::from_parts(words, counts, min_count))
    }

    /// Rebuilds a vocabulary from stored rows whose order is the id order.
    pub fn from_parts(words: Vec<String>, counts: Vec<u64>, min_count: u64) -> Self {
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        Vocabulary {
            words,
            counts,
            index,
            min_count,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn count(&self, id: u32) -> u64 {
        self.counts[id as usize]
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str, u64)> {
        self.words
            .iter()
            .zip(&self.counts)
            .enumerate()
            .map(|(i, (w, &c))| (i as u32, w.as_str(), c))
    }
}

/// Counts an already-normalized token stream and builds its vocabulary.
pub fn build_vocabulary<'a, I>(tokens: I, min_count: u64) -> Result<Vocabulary>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut counts: HashMap<String, u64> = HashMap::new();
    for tok in tokens {
        if let Some(c) = counts.get_mut(tok) {
            *c += 1;
        } else {
            counts.insert(tok.to_string(), 1);
        }
    }
    Vocabulary::from_counts(counts, min_count)
}

/// Vocabulary over a set of documents, counted per document in parallel.
pub fn build_vocabulary_from_documents(docs: &[&Document], min_count: u64) -> Result<Vocabulary> {
    let partials: Vec<HashMap<&str, u64>> = docs
        .par_iter()
        .map(|doc| {
            let mut counts: HashMap<&str, u64> = HashMap::new();
            for tok in &doc.tokens {
                *counts.entry(tok.as_str()).or_default() += 1;
            }
            counts
        })
        .collect();
    let mut merged: HashMap<String, u64> = HashMap::new();
    for partial in partials {
        for (tok, c) in partial {
            if let Some(total) = merged.get_mut(tok) {
                *total += c;
            } else {
                merged.insert(tok.to_string(), c);
            }
        }
    }
    Vocabulary::from_counts(merged, min_count)
}

/// One ingested document: normalized tokens plus its year.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub year: i32,
    pub path: PathBuf,
    pub tokens: Vec<String>,
}

/// A manifest with its documents read, normalized and sliced.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub manifest: CorpusManifest,
    pub lemmas: Option<LemmaTable>,
    pub documents: Vec<Document>,
    pub slices: Vec<TimeSlice>,
}

impl Corpus {
    pub fn load(manifest: CorpusManifest, tokenizer: &Tokenizer) -> Result<Self> {
        manifest.validate()?;
        if manifest.documents.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let lemmas = match &manifest.lemma_table {
            Some(path) => Some(LemmaTable::load_tsv(path)?),
            None => None,
        };
        let language = manifest.language;
        let documents = manifest
            .documents
            .par_iter()
            .map(|doc| {
                let text = fs::read_to_string(&doc.path).map_err(|e| Error::file(&doc.path, e))?;
                let tokens = tokenizer
                    .tokenize(&text)
                    .iter()
                    .map(|t| normalize_token(t, language, lemmas.as_ref()))
                    .collect();
                Ok(Document {
                    year: doc.year,
                    path: doc.path.clone(),
                    tokens,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_documents(manifest, lemmas, documents)
    }

    /// Builds a corpus from documents whose tokens are already normalized.
    pub fn from_documents(
        manifest: CorpusManifest,
        lemmas: Option<LemmaTable>,
        documents: Vec<Document>,
    ) -> Result<Self> {
        let masses: Vec<DocumentMass> = documents
            .iter()
            .map(|d| DocumentMass {
                year: d.year,
                tokens: d.tokens.len() as u64,
            })
            .collect();
        let slices = build_slices(&manifest.slicing, &masses)?;
        Ok(Corpus {
            manifest,
            lemmas,
            documents,
            slices,
        })
    }

    pub fn documents_in(&self, slice: &TimeSlice) -> Vec<&Document> {
        self.documents.iter().filter(|d| slice.contains(d.year)).collect()
    }

    pub fn normalize(&self, raw: &str) -> String {
        normalize_token(raw, self.manifest.language, self.lemmas.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn masses(pairs: &[(i32, u64)]) -> Vec<DocumentMass> {
        pairs
            .iter()
            .map(|&(year, tokens)| DocumentMass { year, tokens })
            .collect()
    }

    fn spans(slices: &[TimeSlice]) -> Vec<(i32, i32)> {
        slices.iter().map(|s| (s.start_year, s.end_year)).collect()
    }

    #[test]
    fn english_lowercases() {
        assert_eq!(normalize_token("Heart", Language::English, None), "heart");
        assert_eq!(normalize_token("heart", Language::English, None), "heart");
    }

    #[test]
    fn german_uses_lemma_table() {
        let table = LemmaTable::from_pairs([("herzens", "herz")]).unwrap();
        assert_eq!(normalize_token("Herzens", Language::German, Some(&table)), "herz");
        assert_eq!(normalize_token("Haus", Language::German, Some(&table)), "haus");
    }

    #[test]
    fn lemma_chains_resolve_to_fixpoint() {
        let table = LemmaTable::from_pairs([("a", "b"), ("b", "c")]).unwrap();
        assert_eq!(table.lookup("a"), "c");
        assert_eq!(table.lookup("b"), "c");
        assert!(LemmaTable::from_pairs([("a", "b"), ("b", "a")]).is_err());
    }

    #[test]
    fn tokenizer_strips_punctuation() {
        let tok = Tokenizer::default();
        assert_eq!(tok.tokenize("The heart, broken!  Again."), vec!["The", "heart", "broken", "Again"]);
    }

    #[test]
    fn fixed_span_partition() {
        let docs = masses(&[(1830, 5), (1845, 5), (1859, 5)]);
        let slices = build_slices(&SlicingConfig::fixed(10), &docs).unwrap();
        assert_eq!(spans(&slices), vec![(1830, 1839), (1840, 1849), (1850, 1859)]);
        assert_eq!(slices[1].token_count, 5);
        assert_eq!(slices[0].label_year, 1830);
    }

    #[test]
    fn fixed_span_single_year() {
        let docs = masses(&[(1900, 3), (1900, 4)]);
        let slices = build_slices(&SlicingConfig::fixed(10), &docs).unwrap();
        assert_eq!(spans(&slices), vec![(1900, 1900)]);
        assert_eq!(slices[0].token_count, 7);
    }

    #[test]
    fn fixed_span_gap_is_infeasible() {
        let docs = masses(&[(1900, 3), (1925, 4)]);
        let err = build_slices(&SlicingConfig::fixed(10), &docs).unwrap_err();
        assert!(matches!(err, Error::InfeasibleSlicing(_)));
    }

    #[test]
    fn balanced_greedy_sweep() {
        let docs = masses(&[(1900, 100), (1910, 100), (1920, 100), (1930, 100)]);
        let slices = build_slices(&SlicingConfig::balanced(2), &docs).unwrap();
        assert_eq!(spans(&slices), vec![(1900, 1919), (1920, 1930)]);
        assert_eq!(slices[0].token_count, 200);
        assert_eq!(slices[1].token_count, 200);
    }

    #[test]
    fn balanced_respects_max_span() {
        let docs: Vec<_> = (0..120).map(|i| DocumentMass { year: 1800 + i, tokens: 10 }).collect();
        let slices = build_slices(&SlicingConfig::balanced(1), &docs).unwrap();
        assert!(slices.iter().all(|s| s.span_years() <= 50));
        assert_eq!(slices.first().unwrap().start_year, 1800);
        assert_eq!(slices.last().unwrap().end_year, 1919);
    }

    #[test]
    fn balanced_huge_year_is_not_an_error() {
        let docs = masses(&[(1900, 10), (1905, 10_000), (1915, 10), (1925, 10)]);
        let slices = build_slices(&SlicingConfig::balanced(3), &docs).unwrap();
        assert!(slices.iter().all(|s| (10..=50).contains(&s.span_years())));
    }

    #[test]
    fn empty_corpus() {
        assert!(matches!(
            build_slices(&SlicingConfig::fixed(10), &[]),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn vocabulary_counts_and_ids() {
        let vocab = build_vocabulary("a a b".split(' '), 1).unwrap();
        assert_eq!(vocab.len(), 2);
        assert_eq!(vocab.id("a"), Some(0));
        assert_eq!(vocab.count(0), 2);
        assert_eq!(vocab.count(1), 1);

        let vocab = build_vocabulary("a a b".split(' '), 2).unwrap();
        assert_eq!(vocab.words(), &["a".to_string()]);

        assert!(matches!(
            build_vocabulary("a b".split(' '), 5),
            Err(Error::EmptyVocabulary { .. })
        ));
    }

    #[test]
    fn vocabulary_ties_are_lexicographic() {
        let vocab = build_vocabulary("c b a c b a".split(' '), 1).unwrap();
        assert_eq!(vocab.words(), &["a", "b", "c"]);
    }

    #[test]
    fn manifest_rules() {
        let base = CorpusManifest {
            corpus_id: "x".into(),
            language: Language::English,
            slicing: SlicingConfig::fixed(10),
            lemma_table: None,
            documents: vec![ManifestDocument { year: 1850, path: "a.txt".into() }],
        };
        assert!(base.validate().is_ok());

        let mut m = base.clone();
        m.lemma_table = Some("l.tsv".into());
        assert!(m.validate().is_err());

        let mut m = base.clone();
        m.documents[0].year = 999;
        assert!(m.validate().is_err());

        let mut m = base.clone();
        m.corpus_id = " ".into();
        assert!(m.validate().is_err());

        let mut m = base;
        m.slicing = SlicingConfig::fixed(60);
        assert!(m.validate().is_err());
    }

    #[test]
    fn manifest_parses_toml() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.toml");
        fs::write(
            &path,
            r#"
corpus_id = "demo"
language = "german"
lemma_table = "lemmas.tsv"

[slicing]
mode = "balanced"
target_slices = 2

[[documents]]
year = 1850
path = "docs/a.txt"
"#,
        )
        .unwrap();
        let manifest = CorpusManifest::load(&path).unwrap();
        assert_eq!(manifest.language, Language::German);
        assert_eq!(manifest.slicing.target_slices, Some(2));
        assert_eq!(manifest.slicing.min_span_years, 10);
        assert_eq!(manifest.documents[0].path, dir.path().join("docs/a.txt"));
        assert_eq!(manifest.lemma_table.as_deref(), Some(dir.path().join("lemmas.tsv").as_path()));
    }
}
