use std::io::Write;

use crate::corpus::DocFreqIndex;
use crate::error::{Error, Result};
use crate::matrix::Method;
use crate::rerank::RankedTopic;

pub const DEFAULT_EPSILON: f64 = 1.0;

/// Σ_{m=2..M} Σ_{l<m} log((D(v_m, v_l) + ε) / D(v_l)) over an ordered word
/// list. The denominator uses the higher-ranked word of each pair.
pub fn coherence_of_words(topic: usize, words: &[u32], index: &DocFreqIndex, epsilon: f64) -> Result<f64> {
    if words.len() < 2 {
        return Err(Error::Argument(format!(
            "coherence needs at least 2 words, got {}",
            words.len()
        )));
    }
    let mut total = 0.0;
    for m in 1..words.len() {
        for l in 0..m {
            let denom = index.df(words[l]);
            if denom == 0 {
                return Err(Error::MetricUndefined {
                    topic,
                    word: words[l],
                });
            }
            let joint = index.codf(words[m], words[l])?;
            total += ((joint as f64 + epsilon) / denom as f64).ln();
        }
    }
    Ok(total)
}

pub fn coherence(topic: &RankedTopic, index: &DocFreqIndex, epsilon: f64) -> Result<f64> {
    let words: Vec<u32> = topic.word_ids().collect();
    coherence_of_words(topic.topic_id, &words, index, epsilon)
}

/// One coherence value per topic; `value` keeps per-topic failures.
#[derive(Debug)]
pub struct CoherenceRow {
    pub topic_id: usize,
    pub method: Method,
    pub m: usize,
    pub epsilon: f64,
    pub value: Result<f64>,
}

/// Coherence of the first `m` words of every ranked topic.
pub fn coherence_report(ranked: &[RankedTopic], m: usize, index: &DocFreqIndex, epsilon: f64) -> Vec<CoherenceRow> {
    ranked
        .iter()
        .map(|topic| {
            let words: Vec<u32> = topic.word_ids().take(m).collect();
            CoherenceRow {
                topic_id: topic.topic_id,
                method: topic.method,
                m,
                epsilon,
                value: coherence_of_words(topic.topic_id, &words, index, epsilon),
            }
        })
        .collect()
}

/// `topic_id,method,M,epsilon,coherence`; undefined values are written as `NA`.
pub fn write_coherence_csv<W: Write>(mut out: W, rows: &[CoherenceRow]) -> std::io::Result<()> {
    writeln!(out, "topic_id,method,M,epsilon,coherence")?;
    for row in rows {
        match &row.value {
            Ok(v) => writeln!(out, "{},{},{},{},{}", row.topic_id, row.method, row.m, row.epsilon, v)?,
            Err(_) => writeln!(out, "{},{},{},{},NA", row.topic_id, row.method, row.m, row.epsilon)?,
        }
    }
    out.flush()
}
