use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lda::GibbsState;

/// Immutable copy of the sampler counts that scoring works from.
#[derive(Debug, Clone, PartialEq)]
pub struct CountSnapshot {
    topics: usize,
    vocab_size: usize,
    beta: f64,
    /// Topic-major: `n_kv[k * V + v]`.
    n_kv: Vec<u32>,
    n_k: Vec<u64>,
    n_v: Vec<u64>,
    n_total: u64,
}

impl CountSnapshot {
    pub fn from_state(state: &GibbsState, beta: f64) -> Self {
        let (k, v) = (state.topics(), state.vocab_size());
        let mut n_kv = vec![0u32; k * v];
        for w in 0..v {
            for (t, &c) in state.word_topic_row(w as u32).iter().enumerate() {
                n_kv[t * v + w] = c;
            }
        }
        Self::from_topic_word(k, v, n_kv, beta).expect("sampler state has consistent shape")
    }

    /// Builds a snapshot from a topic-major K×V count table.
    pub fn from_topic_word(topics: usize, vocab_size: usize, n_kv: Vec<u32>, beta: f64) -> Result<Self> {
        if topics == 0 || n_kv.len() != topics * vocab_size {
            return Err(Error::Argument(format!(
                "count table of length {} does not match {topics}x{vocab_size}",
                n_kv.len()
            )));
        }
        if beta.is_nan() || beta <= 0.0 {
            return Err(Error::Config(format!("beta must be > 0, got {beta}")));
        }
        let mut n_k = vec![0u64; topics];
        let mut n_v = vec![0u64; vocab_size];
        for (k, row) in n_kv.chunks_exact(vocab_size.max(1)).enumerate().take(topics) {
            for (v, &c) in row.iter().enumerate() {
                n_k[k] += c as u64;
                n_v[v] += c as u64;
            }
        }
        let n_total = n_k.iter().sum();
        Ok(Self {
            topics,
            vocab_size,
            beta,
            n_kv,
            n_k,
            n_v,
            n_total,
        })
    }

    pub fn topics(&self) -> usize {
        self.topics
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_kv(&self, k: usize, v: usize) -> u32 {
        self.n_kv[k * self.vocab_size + v]
    }

    pub fn topic_row(&self, k: usize) -> &[u32] {
        &self.n_kv[k * self.vocab_size..(k + 1) * self.vocab_size]
    }

    pub fn n_k(&self, k: usize) -> u64 {
        self.n_k[k]
    }

    pub fn n_v(&self, v: usize) -> u64 {
        self.n_v[v]
    }

    pub fn n_total(&self) -> u64 {
        self.n_total
    }

    /// (N_kv + β) / (N_k + Vβ)
    pub fn phi(&self, k: usize, v: usize) -> f64 {
        (self.n_kv(k, v) as f64 + self.beta)
            / (self.n_k[k] as f64 + self.vocab_size as f64 * self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScoreKind {
    Phi,
    Sdw,
    Sdwts,
    Chi,
}

/// Topic representation: how a topic's words are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Norm,
    Sdw,
    Sdwts,
    Chi,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Norm, Method::Sdw, Method::Sdwts, Method::Chi];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Norm => "norm",
            Method::Sdw => "sdw",
            Method::Sdwts => "sdwts",
            Method::Chi => "chi",
        }
    }

    pub fn score_kind(self) -> ScoreKind {
        match self {
            Method::Norm => ScoreKind::Phi,
            Method::Sdw => ScoreKind::Sdw,
            Method::Sdwts => ScoreKind::Sdwts,
            Method::Chi => ScoreKind::Chi,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Argument(format!("unknown method {s:?} (expected norm, sdw, sdwts or chi)")))
    }
}

/// K×V per-topic word scores together with the counts they came from.
#[derive(Debug, Clone)]
pub struct TopicWordMatrix {
    scores: Vec<f64>,
    kind: ScoreKind,
    counts: Arc<CountSnapshot>,
}

impl TopicWordMatrix {
    pub(crate) fn new(scores: Vec<f64>, kind: ScoreKind, counts: Arc<CountSnapshot>) -> Self {
        debug_assert_eq!(scores.len(), counts.topics() * counts.vocab_size());
        Self {
            scores,
            kind,
            counts,
        }
    }

    /// φ point estimate from a count snapshot.
    pub fn phi(counts: Arc<CountSnapshot>) -> Self {
        let (k, v) = (counts.topics(), counts.vocab_size());
        let mut scores = Vec::with_capacity(k * v);
        for t in 0..k {
            scores.extend((0..v).map(|w| counts.phi(t, w)));
        }
        Self::new(scores, ScoreKind::Phi, counts)
    }

    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    pub fn counts(&self) -> &Arc<CountSnapshot> {
        &self.counts
    }

    pub fn topics(&self) -> usize {
        self.counts.topics()
    }

    pub fn vocab_size(&self) -> usize {
        self.counts.vocab_size()
    }

    pub fn get(&self, k: usize, v: usize) -> f64 {
        self.scores[k * self.vocab_size() + v]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let v = self.vocab_size();
        &self.scores[k * v..(k + 1) * v]
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }
}
