//! Embedded single-file model store.
//!
//! Holds per-slice vocabularies, word vectors, induced emotions and the
//! cached top-K neighbor and context lists. Similarities between arbitrary
//! word pairs are computed from the stored vectors at query time; only each
//! word's nearest neighbors are precomputed.

mod tables;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use tables::{
    ContextRow, CorpusRow, EmotionRow, LemmaRow, NeighborRow, SliceRow, Table, Tables, VectorRow, WordRow,
    FORMAT_VERSION, MAGIC,
};

use crate::corpus::{normalize_token, Language, LemmaTable, TimeSlice, Vocabulary};
use crate::embed::{cosine, norm, EmbeddingModel};
use crate::emotion::{EmotionSeries, VadScore};
use crate::error::{Error, Result};

pub const DEFAULT_TOP_K: usize = 10;
pub const DEFAULT_CONTEXTS_K: usize = 20;

/// Hyperparameters a corpus was built with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusParams {
    pub window: usize,
    pub min_count: u64,
    pub dim: usize,
    pub alpha: f64,
    pub eig_weight: f64,
    pub svd_seed: u64,
    pub top_k: usize,
    pub contexts_k: usize,
    pub min_seed_sim: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusInfo {
    pub corpus_id: String,
    pub language: Language,
    pub params: CorpusParams,
}

/// Everything computed for one slice, keyed by the slice vocabulary's ids.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceArtifacts {
    pub slice: TimeSlice,
    pub vocab: Vocabulary,
    /// Row-major `vocab.len() x dim`.
    pub vectors: Vec<f32>,
    pub emotions: BTreeMap<u32, VadScore>,
    /// Per word id, neighbors ranked from 1.
    pub top_similar: Vec<Vec<(u32, f64)>>,
    pub contexts: Vec<Vec<(u32, f64)>>,
}

impl SliceArtifacts {
    pub fn from_model(
        slice: TimeSlice,
        model: &EmbeddingModel,
        emotions: BTreeMap<u32, VadScore>,
        top_similar: Vec<Vec<(u32, f64)>>,
        contexts: Vec<Vec<(u32, f64)>>,
    ) -> Self {
        SliceArtifacts {
            slice,
            vocab: model.vocab().clone(),
            vectors: model.vectors().to_vec(),
            emotions,
            top_similar,
            contexts,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitReceipt {
    pub corpus_id: String,
    pub slice_id: u32,
    pub words: usize,
    /// SHA-256 (hex) over the slice's encoded rows.
    pub checksum: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SliceData {
    pub slice: TimeSlice,
    pub vocab: Vocabulary,
    vectors: Vec<f32>,
    norms: Vec<f64>,
    pub emotions: BTreeMap<u32, VadScore>,
    pub top_similar: Vec<Vec<(u32, f64)>>,
    pub contexts: Vec<Vec<(u32, f64)>>,
}

impl SliceData {
    pub fn vector(&self, id: u32, dim: usize) -> &[f32] {
        &self.vectors[id as usize * dim..][..dim]
    }

    pub fn vectors(&self) -> &[f32] {
        &self.vectors
    }

    pub fn relative_frequency(&self, id: u32) -> f64 {
        self.vocab.count(id) as f64 / self.slice.token_count as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusData {
    pub info: CorpusInfo,
    pub lemmas: LemmaTable,
    pub slices: BTreeMap<u32, SliceData>,
}

impl CorpusData {
    pub fn normalize(&self, raw: &str) -> String {
        let lemmas = (self.info.language == Language::German).then_some(&self.lemmas);
        normalize_token(raw, self.info.language, lemmas)
    }

    pub fn dim(&self) -> usize {
        self.info.params.dim
    }

    /// Whether `word` has a vector in at least one slice.
    pub fn contains(&self, word: &str) -> bool {
        self.slices.values().any(|s| s.vocab.id(word).is_some())
    }

    fn require(&self, word: &str) -> Result<()> {
        if self.contains(word) {
            Ok(())
        } else {
            Err(Error::UnknownWord(word.to_string()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimilaritySeries {
    pub word_pair: (String, String),
    pub points: Vec<(u32, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencySeries {
    pub word: String,
    pub points: Vec<(u32, f64)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelStore {
    corpora: BTreeMap<String, CorpusData>,
}

impl ModelStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_corpus(&mut self, info: CorpusInfo, lemmas: LemmaTable) -> Result<()> {
        if info.corpus_id.trim().is_empty() {
            return Err(Error::Consistency("empty corpus_id".into()));
        }
        if info.language == Language::English && !lemmas.is_empty() {
            return Err(Error::Consistency("english corpora carry no lemma table".into()));
        }
        match self.corpora.get_mut(&info.corpus_id) {
            Some(existing) if existing.info == info && existing.lemmas == lemmas => Ok(()),
            Some(_) => Err(Error::Consistency(format!(
                "corpus {} already registered with different parameters",
                info.corpus_id
            ))),
            None => {
                self.corpora.insert(
                    info.corpus_id.clone(),
                    CorpusData {
                        info,
                        lemmas,
                        slices: BTreeMap::new(),
                    },
                );
                Ok(())
            }
        }
    }

    /// Validates and installs one slice, replacing any previous version.
    pub fn write_slice(&mut self, corpus_id: &str, artifacts: SliceArtifacts) -> Result<CommitReceipt> {
        let corpus = self
            .corpora
            .get(corpus_id)
            .ok_or_else(|| Error::UnknownCorpus(corpus_id.to_string()))?;
        let data = validate_slice(&corpus.info, artifacts)?;
        let slice_id = data.slice.slice_id;
        // Slice ids must follow the calendar, so every series comes out in year order.
        let new = &data.slice;
        for (&sid, other) in corpus.slices.iter().filter(|(&sid, _)| sid != slice_id) {
            let (a, b) = (&other.slice, new);
            let ordered = if sid < slice_id { a.end_year < b.start_year } else { b.end_year < a.start_year };
            if !ordered {
                return Err(Error::Consistency(format!(
                    "slice {slice_id} ({}-{}) overlaps or is out of order with slice {sid} ({}-{})",
                    b.start_year, b.end_year, a.start_year, a.end_year
                )));
            }
        }
        let corpus = self.corpora.get_mut(corpus_id).expect("checked above");
        corpus.slices.insert(slice_id, data);
        let words = corpus.slices[&slice_id].vocab.len();
        Ok(CommitReceipt {
            corpus_id: corpus_id.to_string(),
            slice_id,
            words,
            checksum: self.slice_checksum(corpus_id, slice_id)?,
        })
    }

    pub fn corpus(&self, corpus_id: &str) -> Result<&CorpusData> {
        self.corpora
            .get(corpus_id)
            .ok_or_else(|| Error::UnknownCorpus(corpus_id.to_string()))
    }

    /// Corpora in `corpus_id` order.
    pub fn corpora(&self) -> impl Iterator<Item = &CorpusData> {
        self.corpora.values()
    }

    pub fn is_empty(&self) -> bool {
        self.corpora.is_empty()
    }

    pub fn slice_checksum(&self, corpus_id: &str, slice_id: u32) -> Result<String> {
        let corpus = self.corpus(corpus_id)?;
        let slice = corpus
            .slices
            .get(&slice_id)
            .ok_or_else(|| Error::Consistency(format!("no slice {slice_id} in {corpus_id}")))?;
        let mut tables = Tables::default();
        push_slice_rows(&mut tables, corpus_id, corpus.dim(), slice);
        let mut hasher = Sha256::new();
        for table in [Table::Slices, Table::Words, Table::Vectors, Table::Emotions, Table::TopSimilar, Table::Contexts] {
            hasher.update(tables.encode_table(table));
        }
        Ok(hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect())
    }

    /// Cosine of the stored vectors in every slice holding both words.
    pub fn similarity_on_the_fly(&self, corpus_id: &str, word1: &str, word2: &str) -> Result<SimilaritySeries> {
        let corpus = self.corpus(corpus_id)?;
        corpus.require(word1)?;
        corpus.require(word2)?;
        let dim = corpus.dim();
        let mut points = Vec::new();
        for (&slice_id, slice) in &corpus.slices {
            if let (Some(a), Some(b)) = (slice.vocab.id(word1), slice.vocab.id(word2)) {
                points.push((slice_id, cosine(slice.vector(a, dim), slice.vector(b, dim))?));
            }
        }
        Ok(SimilaritySeries {
            word_pair: (word1.to_string(), word2.to_string()),
            points,
        })
    }

    /// Union of cached neighbors over all slices, ranked by their best
    /// cached cosine (ties lexicographic), truncated to `k`.
    pub fn get_reference_words(&self, corpus_id: &str, word: &str, k: usize) -> Result<Vec<(String, f64)>> {
        let corpus = self.corpus(corpus_id)?;
        corpus.require(word)?;
        let mut best: HashMap<&str, f64> = HashMap::new();
        for slice in corpus.slices.values() {
            let Some(id) = slice.vocab.id(word) else { continue };
            for &(nb, cos) in &slice.top_similar[id as usize] {
                let entry = best.entry(slice.vocab.word(nb)).or_insert(f64::NEG_INFINITY);
                if cos > *entry {
                    *entry = cos;
                }
            }
        }
        let mut ranked: Vec<(String, f64)> = best.into_iter().map(|(w, c)| (w.to_string(), c)).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(k);
        Ok(ranked)
    }

    pub fn emotion_series(&self, corpus_id: &str, word: &str) -> Result<EmotionSeries> {
        let corpus = self.corpus(corpus_id)?;
        corpus.require(word)?;
        let points = corpus
            .slices
            .iter()
            .filter_map(|(&sid, slice)| {
                let id = slice.vocab.id(word)?;
                slice.emotions.get(&id).map(|s| (sid, *s))
            })
            .collect();
        Ok(EmotionSeries::new(word, points))
    }

    pub fn frequency_series(&self, corpus_id: &str, word: &str) -> Result<FrequencySeries> {
        let corpus = self.corpus(corpus_id)?;
        corpus.require(word)?;
        let points = corpus
            .slices
            .iter()
            .filter_map(|(&sid, slice)| slice.vocab.id(word).map(|id| (sid, slice.relative_frequency(id))))
            .collect();
        Ok(FrequencySeries {
            word: word.to_string(),
            points,
        })
    }

    /// Stored typical contexts per slice, at most `k` each.
    pub fn typical_contexts(&self, corpus_id: &str, word: &str, k: usize) -> Result<Vec<(u32, Vec<(String, f64)>)>> {
        let corpus = self.corpus(corpus_id)?;
        corpus.require(word)?;
        Ok(corpus
            .slices
            .iter()
            .filter_map(|(&sid, slice)| {
                let id = slice.vocab.id(word)?;
                let ranked = slice.contexts[id as usize]
                    .iter()
                    .take(k)
                    .map(|&(c, s)| (slice.vocab.word(c).to_string(), s))
                    .collect();
                Some((sid, ranked))
            })
            .collect())
    }

    pub fn to_tables(&self) -> Tables {
        let mut t = Tables::default();
        for corpus in self.corpora.values() {
            let id = &corpus.info.corpus_id;
            t.corpora.push(CorpusRow {
                corpus_id: id.clone(),
                language: corpus.info.language.as_str().to_string(),
                params: serde_json::to_string(&corpus.info.params).expect("params serialize"),
            });
            for (surface, lemma) in corpus.lemmas.iter() {
                t.lemmas.push(LemmaRow {
                    corpus_id: id.clone(),
                    surface: surface.to_string(),
                    lemma: lemma.to_string(),
                });
            }
            for slice in corpus.slices.values() {
                push_slice_rows(&mut t, id, corpus.dim(), slice);
            }
        }
        t
    }

    /// Reassembles a store from rows, checking referential integrity.
    pub fn from_tables(t: Tables) -> Result<Self> {
        let bad = |m: String| Error::CorruptStore(m);
        let mut store = ModelStore::new();
        let mut lemma_pairs: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
        for row in t.lemmas {
            lemma_pairs.entry(row.corpus_id).or_default().push((row.surface, row.lemma));
        }
        for row in t.corpora {
            let language = Language::parse(&row.language)
                .ok_or_else(|| bad(format!("unknown language {:?}", row.language)))?;
            let params: CorpusParams = serde_json::from_str(&row.params)
                .map_err(|e| bad(format!("corpus {} params: {e}", row.corpus_id)))?;
            let lemmas = LemmaTable::from_pairs(lemma_pairs.remove(&row.corpus_id).unwrap_or_default())?;
            if store.corpora.contains_key(&row.corpus_id) {
                return Err(bad(format!("duplicate corpus {}", row.corpus_id)));
            }
            store.register_corpus(
                CorpusInfo {
                    corpus_id: row.corpus_id,
                    language,
                    params,
                },
                lemmas,
            )?;
        }
        if let Some(orphan) = lemma_pairs.keys().next() {
            return Err(bad(format!("lemmas for unknown corpus {orphan}")));
        }

        type Key = (String, u32);
        let mut words: BTreeMap<Key, Vec<WordRow>> = BTreeMap::new();
        for row in t.words {
            words.entry((row.corpus_id.clone(), row.slice_id)).or_default().push(row);
        }
        let mut vectors: BTreeMap<Key, Vec<VectorRow>> = BTreeMap::new();
        for row in t.vectors {
            vectors.entry((row.corpus_id.clone(), row.slice_id)).or_default().push(row);
        }
        let mut emotions: BTreeMap<Key, Vec<EmotionRow>> = BTreeMap::new();
        for row in t.emotions {
            emotions.entry((row.corpus_id.clone(), row.slice_id)).or_default().push(row);
        }
        let mut neighbors: BTreeMap<Key, Vec<NeighborRow>> = BTreeMap::new();
        for row in t.top_similar {
            neighbors.entry((row.corpus_id.clone(), row.slice_id)).or_default().push(row);
        }
        let mut contexts: BTreeMap<Key, Vec<ContextRow>> = BTreeMap::new();
        for row in t.contexts {
            contexts.entry((row.corpus_id.clone(), row.slice_id)).or_default().push(row);
        }

        for srow in t.slices {
            let key = (srow.corpus_id.clone(), srow.slice_id);
            let corpus = store.corpus(&srow.corpus_id)?;
            let dim = corpus.dim();

            let mut wrows = words.remove(&key).unwrap_or_default();
            wrows.sort_by_key(|r| r.word_id);
            if wrows.iter().enumerate().any(|(i, r)| r.word_id as usize != i) {
                return Err(bad(format!("slice {key:?}: word ids not contiguous")));
            }
            let n = wrows.len();
            let (names, counts): (Vec<String>, Vec<u64>) = wrows.into_iter().map(|r| (r.word, r.count)).unzip();
            let vocab = Vocabulary::from_parts(names, counts, corpus.info.params.min_count);

            let mut vrows = vectors.remove(&key).unwrap_or_default();
            vrows.sort_by_key(|r| r.word_id);
            if vrows.len() != n || vrows.iter().enumerate().any(|(i, r)| r.word_id as usize != i) {
                return Err(bad(format!("slice {key:?}: vectors do not match vocabulary")));
            }
            let mut flat = Vec::with_capacity(n * dim);
            for r in vrows {
                if r.values.len() != dim {
                    return Err(bad(format!("slice {key:?}: vector block of {} values, d = {dim}", r.values.len())));
                }
                flat.extend(r.values);
            }

            let emotion_map = emotions
                .remove(&key)
                .unwrap_or_default()
                .into_iter()
                .map(|r| (r.word_id, VadScore::new(r.valence, r.arousal, r.dominance)))
                .collect();

            let top_similar = ranked_lists(n, neighbors.remove(&key).unwrap_or_default().into_iter().map(|r| (r.word_id, r.rank, r.neighbor_id, r.cosine)))
                .map_err(|m| bad(format!("slice {key:?} top_similar: {m}")))?;
            let context_lists = ranked_lists(n, contexts.remove(&key).unwrap_or_default().into_iter().map(|r| (r.word_id, r.rank, r.context_id, r.ppmi)))
                .map_err(|m| bad(format!("slice {key:?} contexts: {m}")))?;

            let artifacts = SliceArtifacts {
                slice: TimeSlice {
                    slice_id: srow.slice_id,
                    label_year: srow.start_year,
                    start_year: srow.start_year,
                    end_year: srow.end_year,
                    token_count: srow.token_count,
                },
                vocab,
                vectors: flat,
                emotions: emotion_map,
                top_similar,
                contexts: context_lists,
            };
            let corpus_id = srow.corpus_id.clone();
            if store.corpus(&corpus_id)?.slices.contains_key(&srow.slice_id) {
                return Err(bad(format!("duplicate slice {key:?}")));
            }
            store.write_slice(&corpus_id, artifacts).map_err(|e| match e {
                Error::Consistency(m) => bad(m),
                other => other,
            })?;
        }

        let leftover = words
            .keys()
            .chain(vectors.keys())
            .chain(emotions.keys())
            .chain(neighbors.keys())
            .chain(contexts.keys())
            .next();
        if let Some(key) = leftover {
            return Err(bad(format!("rows reference unknown slice {key:?}")));
        }
        Ok(store)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.to_tables().write_binary(&mut buf).expect("writing to memory");
        buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::from_tables(Tables::from_bytes(bytes)?)
    }

    /// Writes the store through a temporary file in the target directory and
    /// renames it into place.
    pub fn save(&self, path: &Path) -> Result<()> {
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::file(dir, e))?;
        tmp.write_all(&self.to_bytes()).map_err(|e| Error::file(path, e))?;
        tmp.as_file().sync_all().map_err(|e| Error::file(path, e))?;
        tmp.persist(path).map_err(|e| Error::file(path, e.error))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::file(path, e))?;
        Self::from_bytes(&bytes)
    }

    pub fn export_csv<W: io::Write>(&self, table: Table, out: W) -> Result<()> {
        self.to_tables().write_csv(table, out)
    }

    /// Writes one `<table>.csv` per table into `dir`.
    pub fn export_csv_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
        let tables = self.to_tables();
        for table in Table::ALL {
            let path = dir.join(format!("{}.csv", table.name()));
            let file = fs::File::create(&path).map_err(|e| Error::file(&path, e))?;
            tables.write_csv(table, io::BufWriter::new(file))?;
        }
        Ok(())
    }

    pub fn import_csv_dir(dir: &Path) -> Result<Self> {
        let mut tables = Tables::default();
        for table in Table::ALL {
            let path = dir.join(format!("{}.csv", table.name()));
            let file = fs::File::open(&path).map_err(|e| Error::file(&path, e))?;
            tables.read_csv(table, file)?;
        }
        Self::from_tables(tables)
    }
}

fn ranked_lists(
    n: usize,
    rows: impl Iterator<Item = (u32, u32, u32, f64)>,
) -> std::result::Result<Vec<Vec<(u32, f64)>>, String> {
    let mut lists: Vec<Vec<(u32, u32, f64)>> = vec![Vec::new(); n];
    for (word, rank, other, score) in rows {
        let list = lists.get_mut(word as usize).ok_or(format!("word id {word} out of range"))?;
        list.push((rank, other, score));
    }
    lists
        .into_iter()
        .map(|mut list| {
            list.sort_by_key(|e| e.0);
            if list.iter().enumerate().any(|(i, e)| e.0 as usize != i + 1) {
                return Err("ranks not contiguous from 1".to_string());
            }
            Ok(list.into_iter().map(|(_, o, s)| (o, s)).collect())
        })
        .collect()
}

fn push_slice_rows(t: &mut Tables, corpus_id: &str, dim: usize, s: &SliceData) {
    let sid = s.slice.slice_id;
    t.slices.push(SliceRow {
        corpus_id: corpus_id.to_string(),
        slice_id: sid,
        start_year: s.slice.start_year,
        end_year: s.slice.end_year,
        token_count: s.slice.token_count,
    });
    for (id, word, count) in s.vocab.iter() {
        t.words.push(WordRow {
            corpus_id: corpus_id.to_string(),
            slice_id: sid,
            word_id: id,
            word: word.to_string(),
            count,
        });
        t.vectors.push(VectorRow {
            corpus_id: corpus_id.to_string(),
            slice_id: sid,
            word_id: id,
            values: s.vector(id, dim).to_vec(),
        });
    }
    for (&id, e) in &s.emotions {
        t.emotions.push(EmotionRow {
            corpus_id: corpus_id.to_string(),
            slice_id: sid,
            word_id: id,
            valence: e.valence,
            arousal: e.arousal,
            dominance: e.dominance,
        });
    }
    for (id, list) in s.top_similar.iter().enumerate() {
        for (rank, &(nb, cos)) in list.iter().enumerate() {
            t.top_similar.push(NeighborRow {
                corpus_id: corpus_id.to_string(),
                slice_id: sid,
                word_id: id as u32,
                rank: rank as u32 + 1,
                neighbor_id: nb,
                cosine: cos,
            });
        }
    }
    for (id, list) in s.contexts.iter().enumerate() {
        for (rank, &(c, score)) in list.iter().enumerate() {
            t.contexts.push(ContextRow {
                corpus_id: corpus_id.to_string(),
                slice_id: sid,
                word_id: id as u32,
                rank: rank as u32 + 1,
                context_id: c,
                ppmi: score,
            });
        }
    }
}

fn validate_slice(info: &CorpusInfo, a: SliceArtifacts) -> Result<SliceData> {
    let fail = |m: String| Err(Error::Consistency(format!("slice {}: {m}", a.slice.slice_id)));
    let n = a.vocab.len();
    let dim = info.params.dim;
    if a.slice.start_year > a.slice.end_year || a.slice.label_year != a.slice.start_year {
        return fail("invalid year range".into());
    }
    if a.vectors.len() != n * dim {
        return fail(format!("{} vector values for {n} words at d = {dim}", a.vectors.len()));
    }
    if a.vectors.iter().any(|v| !v.is_finite()) {
        return fail("non-finite vector value".into());
    }
    if a.vocab.counts().iter().any(|&c| c < info.params.min_count) {
        return fail(format!("word count below min_count {}", info.params.min_count));
    }
    let total: u64 = a.vocab.counts().iter().sum();
    if total > a.slice.token_count {
        return fail(format!("word counts sum to {total} > token_count {}", a.slice.token_count));
    }
    if let Some((&id, _)) = a.emotions.iter().find(|(&id, s)| id as usize >= n || !s.to_array().iter().all(|v| v.is_finite())) {
        return fail(format!("bad emotion entry for word id {id}"));
    }
    for (name, lists, k) in [
        ("top_similar", &a.top_similar, info.params.top_k),
        ("contexts", &a.contexts, info.params.contexts_k),
    ] {
        if lists.len() != n {
            return fail(format!("{name} has {} lists for {n} words", lists.len()));
        }
        for list in lists {
            if list.len() > k {
                return fail(format!("{name} list longer than {k}"));
            }
            if list.iter().any(|&(o, s)| o as usize >= n || !s.is_finite()) {
                return fail(format!("{name} entry out of range"));
            }
        }
    }
    let norms = (0..n).map(|i| norm(&a.vectors[i * dim..][..dim])).collect();
    let vocab = Vocabulary::from_parts(a.vocab.words().to_vec(), a.vocab.counts().to_vec(), info.params.min_count);
    Ok(SliceData {
        slice: a.slice,
        vocab,
        vectors: a.vectors,
        norms,
        emotions: a.emotions,
        top_similar: a.top_similar,
        contexts: a.contexts,
    })
}

/// Concurrent build-phase writer: one commit per slice, each atomic.
#[derive(Debug, Default)]
pub struct StoreWriter {
    inner: Mutex<ModelStore>,
}

impl StoreWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_corpus(&self, info: CorpusInfo, lemmas: LemmaTable) -> Result<()> {
        self.inner.lock().expect("store lock").register_corpus(info, lemmas)
    }

    pub fn write_slice(&self, corpus_id: &str, artifacts: SliceArtifacts) -> Result<CommitReceipt> {
        // Validation runs outside the lock; the insert is the only critical section.
        let info = self.inner.lock().expect("store lock").corpus(corpus_id)?.info.clone();
        validate_slice(&info, artifacts.clone())?;
        self.inner.lock().expect("store lock").write_slice(corpus_id, artifacts)
    }

    pub fn into_store(self) -> ModelStore {
        self.inner.into_inner().expect("store lock")
    }
}

/// Bytes needed to store every pairwise cosine of a slice as
/// `(word_id u32, other_id u32, cosine f32)` rows, the precomputed-similarity
/// layout vector storage replaces. The rows are produced and counted, not
/// kept.
pub fn pairwise_similarity_bytes(slice: &SliceData, dim: usize) -> u64 {
    use crate::par::*;
    let n = slice.vocab.len() as u32;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut sink = CountingSink::default();
            let a = slice.vector(i, dim);
            for j in i + 1..n {
                let nb = slice.norms[j as usize];
                let na = slice.norms[i as usize];
                let cos = if na == 0.0 || nb == 0.0 {
                    0.0
                } else {
                    let dot: f64 = a.iter().zip(slice.vector(j, dim)).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum();
                    dot / (na * nb)
                };
                sink.write_all(&i.to_le_bytes()).expect("sink");
                sink.write_all(&j.to_le_bytes()).expect("sink");
                sink.write_all(&(cos as f32).to_le_bytes()).expect("sink");
            }
            sink.0
        })
        .sum()
}

/// Bytes of the encoded vectors table for one slice.
pub fn vector_table_bytes(corpus_id: &str, slice: &SliceData, dim: usize) -> u64 {
    let mut t = Tables::default();
    push_slice_rows(&mut t, corpus_id, dim, slice);
    t.encode_table(Table::Vectors).len() as u64
}

#[derive(Default)]
struct CountingSink(u64);

impl io::Write for CountingSink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0 += buf.len() as u64;
        Ok(buf.len())
    }
    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}
