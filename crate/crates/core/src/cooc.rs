//! Windowed co-occurrence counting, relative frequencies and typical
//! contexts.

use std::collections::{BTreeMap, HashMap};

use crate::corpus::{TimeSlice, Vocabulary};
use crate::embed::PpmiMatrix;
use crate::error::{Error, Result};
use crate::par::*;

pub const DEFAULT_WINDOW: usize = 4;

/// Symmetric co-occurrence counts as a target-major sorted triple list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseCooc {
    vocab_size: usize,
    triples: Vec<(u32, u32, u64)>,
    total_pairs: u64,
}

impl SparseCooc {
    /// Builds from arbitrary triples. Counts must be positive and keys
    /// unique; symmetry is not required here (see [`SparseCooc::is_symmetric`]).
    pub fn from_triples(vocab_size: usize, mut triples: Vec<(u32, u32, u64)>) -> Result<Self> {
        triples.sort_unstable_by_key(|&(t, c, _)| (t, c));
        for pair in triples.windows(2) {
            if (pair[0].0, pair[0].1) == (pair[1].0, pair[1].1) {
                return Err(Error::Consistency(format!(
                    "duplicate co-occurrence key ({}, {})",
                    pair[0].0, pair[0].1
                )));
            }
        }
        let mut total_pairs = 0u64;
        for &(t, c, n) in &triples {
            if n == 0 {
                return Err(Error::Consistency("zero co-occurrence count".into()));
            }
            if t as usize >= vocab_size || c as usize >= vocab_size {
                return Err(Error::Consistency(format!(
                    "co-occurrence index ({t}, {c}) out of range for {vocab_size} words"
                )));
            }
            total_pairs += n;
        }
        Ok(SparseCooc {
            vocab_size,
            triples,
            total_pairs,
        })
    }

    fn from_accumulator(vocab_size: usize, acc: HashMap<(u32, u32), u64>) -> Self {
        let mut triples: Vec<(u32, u32, u64)> = acc.into_iter().map(|((t, c), n)| (t, c, n)).collect();
        triples.sort_unstable_by_key(|&(t, c, _)| (t, c));
        let total_pairs = triples.iter().map(|t| t.2).sum();
        SparseCooc {
            vocab_size,
            triples,
            total_pairs,
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn triples(&self) -> &[(u32, u32, u64)] {
        &self.triples
    }

    pub fn total_pairs(&self) -> u64 {
        self.total_pairs
    }

    pub fn nnz(&self) -> usize {
        self.triples.len()
    }

    pub fn count(&self, target: u32, context: u32) -> u64 {
        self.triples
            .binary_search_by_key(&(target, context), |&(t, c, _)| (t, c))
            .map(|i| self.triples[i].2)
            .unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.triples.iter().all(|&(t, c, n)| self.count(c, t) == n)
    }
}

fn count_document(ids: &[Option<u32>], window: usize, acc: &mut HashMap<(u32, u32), u64>) {
    for (i, left) in ids.iter().enumerate() {
        let Some(left) = *left else { continue };
        for right in ids.iter().skip(i + 1).take(window) {
            let Some(right) = *right else { continue };
            *acc.entry((left, right)).or_default() += 1;
            *acc.entry((right, left)).or_default() += 1;
        }
    }
}

/// Counts each pair of in-vocabulary tokens at distance `1..=window` within
/// the same document, once in each direction, with constant weight.
///
/// Out-of-vocabulary tokens keep their position but contribute no pairs.
pub fn count_cooccurrences<S: AsRef<str> + Sync>(
    documents: &[&[S]],
    vocab: &Vocabulary,
    window: usize,
) -> SparseCooc {
    let window = window.max(1);
    let shards: Vec<HashMap<(u32, u32), u64>> = documents
        .par_iter()
        .map(|doc| {
            let ids: Vec<Option<u32>> = doc.iter().map(|t| vocab.id(t.as_ref())).collect();
            let mut acc = HashMap::new();
            count_document(&ids, window, &mut acc);
            acc
        })
        .collect();

    let mut shards = shards.into_iter();
    let mut merged = shards.next().unwrap_or_default();
    for shard in shards {
        for (key, n) in shard {
            *merged.entry(key).or_default() += n;
        }
    }
    SparseCooc::from_accumulator(vocab.len(), merged)
}

/// `count(w) / slice.token_count` for every vocabulary word.
pub fn relative_frequency(vocab: &Vocabulary, slice: &TimeSlice) -> Result<BTreeMap<String, f64>> {
    if slice.token_count == 0 {
        return Err(Error::EmptySlice(slice.slice_id));
    }
    let total = slice.token_count as f64;
    Ok(vocab
        .iter()
        .map(|(_, w, c)| (w.to_string(), c as f64 / total))
        .collect())
}

/// Top-`k` context words of `word` by PPMI, descending, ties broken
/// lexicographically.
pub fn typical_contexts(
    word: &str,
    vocab: &Vocabulary,
    ppmi: &PpmiMatrix,
    k: usize,
) -> Result<Vec<(String, f64)>> {
    let id = vocab.id(word).ok_or_else(|| Error::UnknownWord(word.to_string()))?;
    Ok(typical_context_ids(id, vocab, ppmi, k)
        .into_iter()
        .map(|(c, s)| (vocab.word(c).to_string(), s))
        .collect())
}

pub(crate) fn typical_context_ids(id: u32, vocab: &Vocabulary, ppmi: &PpmiMatrix, k: usize) -> Vec<(u32, f64)> {
    let mut row: Vec<(u32, f64)> = ppmi.row(id).to_vec();
    row.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| vocab.word(a.0).cmp(vocab.word(b.0)))
    });
    row.truncate(k);
    row
}
