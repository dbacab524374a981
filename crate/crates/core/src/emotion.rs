//! Valence-Arousal-Dominance induction from seed ratings.
//!
//! A word's emotion in one slice is the similarity-weighted mean of the
//! ratings of the seed words, using that slice's embedding model for the
//! similarities. Only seeds with similarity above `min_seed_sim` take part,
//! which keeps every weight positive and the result inside the seed range.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{normalize_token, Language, LemmaTable};
use crate::embed::{cosine, EmbeddingModel};
use crate::error::{Error, Result};
use crate::par::*;

pub const SCALE_MIN: f64 = 1.0;
pub const SCALE_MAX: f64 = 9.0;
pub const DEFAULT_MIN_SEED_SIM: f64 = 0.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VadScore {
    pub valence: f64,
    pub arousal: f64,
    pub dominance: f64,
}

impl VadScore {
    pub fn new(valence: f64, arousal: f64, dominance: f64) -> Self {
        VadScore {
            valence,
            arousal,
            dominance,
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.valence, self.arousal, self.dominance]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        VadScore::new(a[0], a[1], a[2])
    }

    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.to_array().iter().all(|v| (lo..=hi).contains(v))
    }
}

#[derive(Debug, Deserialize)]
struct SeedRow {
    word: String,
    valence: f64,
    arousal: f64,
    dominance: f64,
}

/// Human-rated seed words on the native [1, 9] scale.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedLexicon {
    pub language: Language,
    entries: BTreeMap<String, VadScore>,
}

impl SeedLexicon {
    pub fn new(language: Language, entries: BTreeMap<String, VadScore>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidLexicon("seed lexicon is empty".into()));
        }
        if let Some((w, _)) = entries.iter().find(|(_, s)| !s.within(SCALE_MIN, SCALE_MAX)) {
            return Err(Error::InvalidLexicon(format!(
                "seed {w:?} rated outside [{SCALE_MIN}, {SCALE_MAX}]"
            )));
        }
        Ok(SeedLexicon { language, entries })
    }

    /// Reads `word,valence,arousal,dominance` CSV with a header row.
    pub fn from_reader<R: Read>(language: Language, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["word", "valence", "arousal", "dominance"];
        if headers.len() != 4 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(Error::InvalidLexicon(format!(
                "expected header word,valence,arousal,dominance, found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut entries = BTreeMap::new();
        for row in rdr.deserialize() {
            let row: SeedRow = row?;
            let score = VadScore::new(row.valence, row.arousal, row.dominance);
            if entries.insert(row.word.clone(), score).is_some() {
                return Err(Error::InvalidLexicon(format!("duplicate seed {:?}", row.word)));
            }
        }
        Self::new(language, entries)
    }

    pub fn load(language: Language, path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::file(path, e))?;
        Self::from_reader(language, file)
    }

    /// Normalizes seed words the way corpus tokens are normalized. Seeds that
    /// collapse onto the same form are averaged.
    pub fn normalized(&self, lemmas: Option<&LemmaTable>) -> Self {
        let mut grouped: BTreeMap<String, Vec<VadScore>> = BTreeMap::new();
        for (w, s) in &self.entries {
            grouped
                .entry(normalize_token(w, self.language, lemmas))
                .or_default()
                .push(*s);
        }
        let entries = grouped
            .into_iter()
            .map(|(w, scores)| {
                let n = scores.len() as f64;
                let sum = scores.iter().fold([0.0; 3], |mut acc, s| {
                    for (a, v) in acc.iter_mut().zip(s.to_array()) {
                        *a += v;
                    }
                    acc
                });
                (w, VadScore::from_array(sum.map(|v| v / n)))
            })
            .collect();
        SeedLexicon {
            language: self.language,
            entries,
        }
    }

    pub fn get(&self, word: &str) -> Option<VadScore> {
        self.entries.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, VadScore)> {
        self.entries.iter().map(|(w, s)| (w.as_str(), *s))
    }
}

/// Similarity-weighted mean of seed ratings for `word` in one slice.
///
/// The word itself never counts as its own seed.
pub fn induce_emotion(
    word: &str,
    model: &EmbeddingModel,
    seeds: &SeedLexicon,
    min_seed_sim: f64,
) -> Result<VadScore> {
    let target = model
        .vector_of(word)
        .ok_or_else(|| Error::UnknownWord(word.to_string()))?;
    let mut used = Vec::new();
    for (seed, score) in seeds.iter() {
        if seed == word {
            continue;
        }
        let Some(seed_vec) = model.vector_of(seed) else {
            continue;
        };
        let sim = cosine(target, seed_vec)?;
        if sim <= min_seed_sim || sim <= 0.0 {
            continue;
        }
        used.push((sim, score.to_array()));
    }
    let weight_sum: f64 = used.iter().map(|u| u.0).sum();
    if weight_sum <= 0.0 {
        return Err(Error::NoUsableSeeds(word.to_string()));
    }
    // Normalise weights first so a single seed reproduces its rating exactly.
    let mut acc = [0.0f64; 3];
    for (sim, v) in used {
        let w = sim / weight_sum;
        for (a, x) in acc.iter_mut().zip(v) {
            *a += w * x;
        }
    }
    Ok(VadScore::from_array(acc))
}

/// Induces every target in every slice where it has a vector. Failures
/// (missing word, no usable seeds) are omitted and logged.
pub fn induce_lexicon(
    models: &[EmbeddingModel],
    seeds: &SeedLexicon,
    targets: &[String],
    min_seed_sim: f64,
) -> BTreeMap<(u32, String), VadScore> {
    let jobs: Vec<(&EmbeddingModel, &String)> = models
        .iter()
        .flat_map(|m| targets.iter().map(move |t| (m, t)))
        .collect();
    jobs.par_iter()
        .filter_map(|&(model, word)| match induce_emotion(word, model, seeds, min_seed_sim) {
            Ok(score) => Some(((model.slice_id, word.clone()), score)),
            Err(e) => {
                log::debug!("slice {}: no emotion for {word:?}: {e}", model.slice_id);
                None
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Centers on the mean and divides by the population standard deviation;
/// constant input maps to zeros.
pub fn zscale_series(values: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    if std == 0.0 || !std.is_finite() {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - mean) / std).collect()
}

/// Raw and display (z-scored per dimension) emotion trajectory of one word.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmotionSeries {
    pub word: String,
    pub points: Vec<(u32, VadScore)>,
    pub display_points: Vec<(u32, [f64; 3])>,
}

impl EmotionSeries {
    pub fn new(word: impl Into<String>, mut points: Vec<(u32, VadScore)>) -> Self {
        points.sort_by_key(|p| p.0);
        let dims: Vec<Vec<f64>> = (0..3)
            .map(|d| zscale_series(&points.iter().map(|(_, s)| s.to_array()[d]).collect::<Vec<_>>()))
            .collect();
        let display_points = points
            .iter()
            .enumerate()
            .map(|(i, (slice, _))| (*slice, [dims[0][i], dims[1][i], dims[2][i]]))
            .collect();
        EmotionSeries {
            word: word.into(),
            points,
            display_points,
        }
    }
}

/// Writes `word,slice,valence,arousal,dominance` rows.
pub fn export_lexicon<W: Write>(lexicon: &BTreeMap<(u32, String), VadScore>, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["word", "slice", "valence", "arousal", "dominance"])?;
    for ((slice, word), s) in lexicon {
        wtr.write_record([
            word.clone(),
            slice.to_string(),
            s.valence.to_string(),
            s.arousal.to_string(),
            s.dominance.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
