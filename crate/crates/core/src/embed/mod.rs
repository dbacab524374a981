//! PPMI construction, truncated SVD embeddings and cosine queries.

mod ppmi;
pub mod svd;

use std::cmp::Ordering;

pub use ppmi::{ppmi, PpmiMatrix, DEFAULT_ALPHA};
pub use svd::{randomized_svd, CsrMatrix, SvdFactors, SvdOptions};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::par::*;

pub const DEFAULT_DIM: usize = 300;
pub const DEFAULT_EIG_WEIGHT: f64 = 0.0;

/// Dense per-slice word vectors: row `w` of `U_d * diag(s)^p`, stored as f32.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel {
    pub slice_id: u32,
    pub eig_weight: f64,
    pub svd_seed: u64,
    pub singular_values: Vec<f64>,
    vocab: Vocabulary,
    dim: usize,
    vectors: Vec<f32>,
}

impl EmbeddingModel {
    pub fn new(slice_id: u32, vocab: Vocabulary, dim: usize, vectors: Vec<f32>) -> Result<Self> {
        if vectors.len() != vocab.len() * dim {
            return Err(Error::Consistency(format!(
                "{} vector values for {} words of dimension {dim}",
                vectors.len(),
                vocab.len()
            )));
        }
        if vectors.iter().any(|v| !v.is_finite()) {
            return Err(Error::Consistency("non-finite vector entry".into()));
        }
        Ok(EmbeddingModel {
            slice_id,
            eig_weight: DEFAULT_EIG_WEIGHT,
            svd_seed: 0,
            singular_values: Vec::new(),
            vocab,
            dim,
            vectors,
        })
    }

    /// Word vectors from SVD factors, `U * diag(s)^eig_weight`.
    pub fn from_factors(
        slice_id: u32,
        vocab: Vocabulary,
        factors: &SvdFactors,
        eig_weight: f64,
        svd_seed: u64,
    ) -> Result<Self> {
        let dim = factors.singular_values.len();
        let n = factors.u.nrows();
        let weights: Vec<f64> = factors
            .singular_values
            .iter()
            .map(|&s| if eig_weight == 0.0 { 1.0 } else { s.powf(eig_weight) })
            .collect();
        let mut vectors = Vec::with_capacity(n * dim);
        for i in 0..n {
            for (j, w) in weights.iter().enumerate() {
                vectors.push((factors.u[(i, j)] * w) as f32);
            }
        }
        let mut model = Self::new(slice_id, vocab, dim, vectors)?;
        model.eig_weight = eig_weight;
        model.svd_seed = svd_seed;
        model.singular_values = factors.singular_values.clone();
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn vector(&self, id: u32) -> &[f32] {
        &self.vectors[id as usize * self.dim..][..self.dim]
    }

    pub fn vector_of(&self, word: &str) -> Option<&[f32]> {
        self.vocab.id(word).map(|id| self.vector(id))
    }

    pub fn vectors(&self) -> &[f32] {
        &self.vectors
    }

    pub fn similarity(&self, a: &str, b: &str) -> Result<f64> {
        let va = self.vector_of(a).ok_or_else(|| Error::UnknownWord(a.to_string()))?;
        let vb = self.vector_of(b).ok_or_else(|| Error::UnknownWord(b.to_string()))?;
        cosine(va, vb)
    }

    pub fn norms(&self) -> Vec<f64> {
        (0..self.len() as u32).map(|i| norm(self.vector(i))).collect()
    }
}

/// Factors `ppmi` to `dim` dimensions and wraps the result as word vectors.
pub fn truncated_svd(
    ppmi: &PpmiMatrix,
    vocab: Vocabulary,
    slice_id: u32,
    dim: usize,
    eig_weight: f64,
    opts: &SvdOptions,
) -> Result<EmbeddingModel> {
    if ppmi.vocab_size() != vocab.len() {
        return Err(Error::Consistency(format!(
            "PPMI matrix has {} rows, vocabulary {} words",
            ppmi.vocab_size(),
            vocab.len()
        )));
    }
    if !(0.0..=1.0).contains(&eig_weight) {
        return Err(Error::InvalidConfig(format!("eig weight {eig_weight} outside [0, 1]")));
    }
    let factors = randomized_svd(&CsrMatrix::from(ppmi), dim, opts)?;
    EmbeddingModel::from_factors(slice_id, vocab, &factors, eig_weight, opts.seed)
}

pub fn norm(v: &[f32]) -> f64 {
    v.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt()
}

fn dot(u: &[f32], v: &[f32]) -> f64 {
    u.iter().zip(v).map(|(&a, &b)| f64::from(a) * f64::from(b)).sum()
}

fn cosine_with_norms(u: &[f32], v: &[f32], nu: f64, nv: f64) -> f64 {
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    (dot(u, v) / (nu * nv)).clamp(-1.0, 1.0)
}

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine(u: &[f32], v: &[f32]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    Ok(cosine_with_norms(u, v, norm(u), norm(v)))
}

fn rank_order(vocab: &Vocabulary, a: &(u32, f64), b: &(u32, f64)) -> Ordering {
    b.1.total_cmp(&a.1)
        .then_with(|| vocab.word(a.0).cmp(vocab.word(b.0)))
}

fn top_k_ids(model: &EmbeddingModel, norms: &[f64], id: u32, k: usize, exclude_self: bool) -> Vec<(u32, f64)> {
    let query = model.vector(id);
    let nq = norms[id as usize];
    let mut scored: Vec<(u32, f64)> = (0..model.len() as u32)
        .filter(|&j| !(exclude_self && j == id))
        .map(|j| (j, cosine_with_norms(query, model.vector(j), nq, norms[j as usize])))
        .collect();
    let vocab = model.vocab();
    if k < scored.len() {
        scored.select_nth_unstable_by(k, |a, b| rank_order(vocab, a, b));
        scored.truncate(k);
    }
    scored.sort_by(|a, b| rank_order(vocab, a, b));
    scored
}

/// The `k` most cosine-similar words, descending, ties lexicographic.
pub fn top_k_similar(word: &str, model: &EmbeddingModel, k: usize, exclude_self: bool) -> Result<Vec<(String, f64)>> {
    let id = model
        .vocab()
        .id(word)
        .ok_or_else(|| Error::UnknownWord(word.to_string()))?;
    let norms = model.norms();
    Ok(top_k_ids(model, &norms, id, k, exclude_self)
        .into_iter()
        .map(|(j, s)| (model.vocab().word(j).to_string(), s))
        .collect())
}

/// Self-excluding top-`k` neighbor lists for every word, in id order.
pub fn all_top_k(model: &EmbeddingModel, k: usize) -> Vec<Vec<(u32, f64)>> {
    let norms = model.norms();
    (0..model.len() as u32)
        .into_par_iter()
        .map(|id| top_k_ids(model, &norms, id, k, true))
        .collect()
}
