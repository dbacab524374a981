//! Synthetic diachronic corpora with a known emotional drift.
//!
//! Sentences are drawn from topical clusters: a pleasant/in-control cluster,
//! an unpleasant/helpless cluster, a family cluster and a neutral household
//! cluster, each with its own context words plus seed words, padded with
//! Zipf-distributed filler. The drifting target word appears in pleasant
//! sentences with probability `1 - t` and in unpleasant ones with
//! probability `t`, where `t` runs from 0 in the first slice to 1 in the
//! last. The stable target always appears in family sentences.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

use crate::emotion::VadScore;
use crate::error::{Error, Result};

pub const DRIFT_TARGET: &str = "heart";
pub const STABLE_TARGET: &str = "woman";

struct Cluster {
    contexts: &'static [&'static str],
    seeds: &'static [(&'static str, [f64; 3])],
}

const PLEASANT: Cluster = Cluster {
    contexts: &[
        "bright", "warm", "sunlight", "garden", "festival", "song", "dance", "smile", "reward", "victory",
        "crown", "feast", "praise", "blossom", "gift", "laughter",
    ],
    seeds: &[
        ("joy", [8.21, 5.55, 7.0]),
        ("love", [8.0, 5.36, 6.92]),
        ("triumph", [7.82, 6.27, 7.64]),
        ("courage", [7.48, 5.55, 7.27]),
        ("freedom", [7.78, 5.08, 7.36]),
        ("delight", [7.8, 5.3, 6.9]),
    ],
};

const UNPLEASANT: Cluster = Cluster {
    contexts: &[
        "hospital", "artery", "blood", "surgeon", "fever", "ward", "collapse", "funeral", "pulse", "vein",
        "ache", "clinic", "autopsy", "bleeding", "tumor", "wound",
    ],
    seeds: &[
        ("stroke", [2.3, 5.9, 2.9]),
        ("disease", [1.68, 5.37, 2.61]),
        ("pain", [2.09, 6.5, 2.82]),
        ("fear", [2.0, 6.14, 2.82]),
        ("death", [1.89, 5.5, 2.59]),
        ("grief", [1.69, 4.78, 2.8]),
    ],
};

const FAMILY: Cluster = Cluster {
    contexts: &[
        "house", "mother", "child", "village", "married", "daughter", "son", "husband", "wife", "family",
        "neighbor", "parlor",
    ],
    seeds: &[
        ("man", [6.73, 3.83, 6.27]),
        ("girl", [6.87, 4.14, 5.64]),
        ("friend", [7.7, 4.6, 6.5]),
    ],
};

const HOUSEHOLD: Cluster = Cluster {
    contexts: &[
        "kitchen", "shelf", "wooden", "drawer", "cupboard", "door", "corner", "floor", "room", "lamp",
        "basket", "chair",
    ],
    seeds: &[
        ("table", [5.73, 2.82, 5.27]),
        ("window", [5.86, 3.05, 5.42]),
        ("road", [5.64, 3.67, 5.2]),
    ],
};

#[derive(Clone, Debug, PartialEq)]
pub struct DriftSpec {
    /// First year of each slice; documents of slice `i` are dated
    /// `slice_years[i] + (doc % 10)`.
    pub slice_years: Vec<i32>,
    pub tokens_per_slice: usize,
    pub docs_per_slice: usize,
    pub filler_words: usize,
    pub seed: u64,
}

impl DriftSpec {
    pub fn new(slice_years: Vec<i32>, tokens_per_slice: usize) -> Self {
        DriftSpec {
            slice_years,
            tokens_per_slice,
            docs_per_slice: 40,
            filler_words: 400,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticCorpus {
    pub documents: Vec<(i32, String)>,
    pub seeds: Vec<(String, VadScore)>,
}

fn filler_vocabulary(n: usize) -> Vec<String> {
    const ONSETS: &[&str] = &["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "sh", "tr"];
    const VOWELS: &[&str] = &["a", "e", "i", "o", "u"];
    let syllables: Vec<String> = ONSETS
        .iter()
        .flat_map(|o| VOWELS.iter().map(move |v| format!("{o}{v}")))
        .collect();
    let mut out = Vec::with_capacity(n);
    'outer: for a in &syllables {
        for b in &syllables {
            for c in ["", "n", "r"] {
                out.push(format!("{a}{b}{c}"));
                if out.len() == n {
                    break 'outer;
                }
            }
        }
    }
    out
}

fn pick<'a, R: Rng>(rng: &mut R, words: &[&'a str]) -> &'a str {
    words[rng.random_range(0..words.len())]
}

pub fn drift_corpus(spec: &DriftSpec) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let clusters = [&PLEASANT, &UNPLEASANT, &FAMILY, &HOUSEHOLD];
    let reserved: Vec<&str> = clusters
        .iter()
        .flat_map(|c| c.contexts.iter().copied().chain(c.seeds.iter().map(|s| s.0)))
        .chain([DRIFT_TARGET, STABLE_TARGET])
        .collect();
    let filler: Vec<String> = filler_vocabulary(spec.filler_words.max(1) + reserved.len())
        .into_iter()
        .filter(|w| !reserved.contains(&w.as_str()))
        .take(spec.filler_words.max(1))
        .collect();
    let zipf = WeightedIndex::new((1..=filler.len()).map(|r| 1.0 / r as f64)).expect("positive weights");
    let n_slices = spec.slice_years.len();

    let mut documents = Vec::new();
    for (s, &start) in spec.slice_years.iter().enumerate() {
        let drift = if n_slices > 1 { s as f64 / (n_slices - 1) as f64 } else { 0.0 };
        let per_doc = (spec.tokens_per_slice / spec.docs_per_slice.max(1)).max(1);
        for d in 0..spec.docs_per_slice.max(1) {
            let mut text = String::new();
            let mut produced = 0;
            while produced < per_doc {
                let c = rng.random_range(0..clusters.len());
                let cluster = clusters[c];
                let len = rng.random_range(8..14);
                let mut sentence: Vec<&str> = Vec::with_capacity(len + 1);
                for _ in 0..len {
                    let roll: f64 = rng.random();
                    if roll < 0.45 {
                        sentence.push(&filler[zipf.sample(&mut rng)]);
                    } else if roll < 0.85 {
                        sentence.push(pick(&mut rng, cluster.contexts));
                    } else {
                        let seeds: Vec<&str> = cluster.seeds.iter().map(|s| s.0).collect();
                        sentence.push(pick(&mut rng, &seeds));
                    }
                }
                let wants_target = match c {
                    0 => rng.random::<f64>() < 0.5 * (1.0 - drift),
                    1 => rng.random::<f64>() < 0.5 * drift,
                    _ => false,
                };
                if wants_target {
                    let pos = rng.random_range(0..=sentence.len());
                    sentence.insert(pos, DRIFT_TARGET);
                }
                if c == 2 && rng.random::<f64>() < 0.5 {
                    let pos = rng.random_range(0..=sentence.len());
                    sentence.insert(pos, STABLE_TARGET);
                }
                produced += sentence.len();
                let mut first = true;
                for w in sentence {
                    if first {
                        // Capitalize sentence starts so normalization matters.
                        let mut chars = w.chars();
                        if let Some(h) = chars.next() {
                            text.extend(h.to_uppercase());
                            text.push_str(chars.as_str());
                        }
                        first = false;
                    } else {
                        text.push(' ');
                        text.push_str(w);
                    }
                }
                text.push_str(". ");
            }
            documents.push((start + (d as i32 % 10), text));
        }
    }

    let seeds = clusters
        .iter()
        .flat_map(|c| c.seeds.iter())
        .map(|(w, s)| (w.to_string(), VadScore::from_array(*s)))
        .collect();
    SyntheticCorpus { documents, seeds }
}

impl SyntheticCorpus {
    pub fn seeds_csv(&self) -> String {
        let mut out = String::from("word,valence,arousal,dominance\n");
        for (w, s) in &self.seeds {
            writeln!(out, "{w},{},{},{}", s.valence, s.arousal, s.dominance).expect("string write");
        }
        out
    }

    /// Writes `docs/`, `manifest.toml` and `seeds.csv` under `dir`.
    /// `slicing` is the manifest's `[slicing]` table body.
    pub fn write_to(&self, dir: &Path, corpus_id: &str, slicing: &str) -> Result<()> {
        let docs = dir.join("docs");
        fs::create_dir_all(&docs).map_err(|e| Error::file(&docs, e))?;
        let mut manifest = format!("corpus_id = \"{corpus_id}\"\nlanguage = \"english\"\n\n[slicing]\n{slicing}\n");
        for (i, (year, text)) in self.documents.iter().enumerate() {
            let name = format!("{i:04}_{year}.txt");
            let path = docs.join(&name);
            fs::write(&path, text).map_err(|e| Error::file(&path, e))?;
            write!(manifest, "\n[[documents]]\nyear = {year}\npath = \"docs/{name}\"\n").expect("string write");
        }
        let path = dir.join("manifest.toml");
        fs::write(&path, manifest).map_err(|e| Error::file(&path, e))?;
        let path = dir.join("seeds.csv");
        fs::write(&path, self.seeds_csv()).map_err(|e| Error::file(&path, e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_sized() {
        let spec = DriftSpec::new(vec![1850, 1900], 5_000);
        let a = drift_corpus(&spec);
        let b = drift_corpus(&spec);
        assert_eq!(a, b);
        assert_eq!(a.documents.len(), 80);
        let tokens: usize = a.documents.iter().map(|(_, t)| t.split_whitespace().count()).sum();
        assert!(tokens >= 10_000);
        assert!(a.documents.iter().all(|(y, _)| (1850..1860).contains(y) || (1900..1910).contains(y)));
    }

    #[test]
    fn filler_is_unique() {
        let words = filler_vocabulary(400);
        let mut sorted = words.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 400);
    }
}
