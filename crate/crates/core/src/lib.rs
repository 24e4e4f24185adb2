//! Topic modeling with reranked top-word representations.
//!
//! LDA is trained by collapsed Gibbs sampling ([`lda`]); each topic can then
//! be represented by its highest-probability words or by one of three
//! rerankings that penalize words common to many topics ([`rerank`]).
//! [`eval`] scores representations with co-document coherence and an
//! automated word-intrusion test.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod lda;
mod matrix;
pub mod rerank;
pub mod synthetic;

pub use corpus::{Corpus, DocFreqIndex, IngestSummary, Tracked, Vocabulary};
pub use error::{Error, Result};
pub use lda::{estimate_phi, train, GibbsState, LdaConfig};
pub use matrix::{CountSnapshot, Method, ScoreKind, TopicWordMatrix};
pub use rerank::{top_m, DeviationReading, RankedTopic, RankedWord};
