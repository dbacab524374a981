//! Diachronic distributional semantics over time-sliced corpora.
//!
//! The build pipeline turns a corpus manifest into per-slice PPMI/SVD word
//! vectors, co-occurrence summaries, relative frequencies and induced
//! Valence-Arousal-Dominance scores, and persists them in a single-file
//! [`store::ModelStore`] that answers similarity queries on the fly.

pub mod cooc;
pub mod corpus;
pub mod embed;
pub mod emotion;
mod error;
pub mod par;
pub mod pipeline;
pub mod store;
pub mod synth;

pub use error::{Error, Result};
