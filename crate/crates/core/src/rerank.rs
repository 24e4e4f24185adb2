//! Topic representations: NORM (rank by φ) and the SDW, SDWTS and CHI
//! rerankings, plus top-M extraction.
//!
//! All scorers rerank the whole vocabulary of every topic.

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::matrix::{CountSnapshot, Method, ScoreKind, TopicWordMatrix};

/// How the deviation weight combines the per-topic differences.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum DeviationReading {
    /// sqrt(Σ_{i≠k} (x_k − x_i)²)
    #[default]
    PerTerm,
    /// sqrt((Σ_{i≠k} (x_k − x_i))²) = |Σ_{i≠k} (x_k − x_i)|
    SquaredSum,
}

impl std::str::FromStr for DeviationReading {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-term" => Ok(Self::PerTerm),
            "squared-sum" => Ok(Self::SquaredSum),
            _ => Err(Error::Argument(format!(
                "unknown deviation reading {s:?} (expected per-term or squared-sum)"
            ))),
        }
    }
}

fn require_phi(phi: &TopicWordMatrix) -> Result<()> {
    if phi.kind() != ScoreKind::Phi {
        return Err(Error::Argument(format!("expected a phi matrix, got {:?}", phi.kind())));
    }
    Ok(())
}

pub fn score_norm(phi: &TopicWordMatrix) -> Result<TopicWordMatrix> {
    require_phi(phi)?;
    Ok(phi.clone())
}

/// Deviation of `column[k]` from every other entry, for each k.
fn deviation_weights(column: &[f64], reading: DeviationReading, out: &mut [f64]) {
    match reading {
        DeviationReading::PerTerm => {
            for (k, &x) in column.iter().enumerate() {
                let sum: f64 = column
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &y)| (x - y) * (x - y))
                    .sum();
                out[k] = sum.sqrt();
            }
        }
        DeviationReading::SquaredSum => {
            for (k, &x) in column.iter().enumerate() {
                let sum: f64 = column
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &y)| x - y)
                    .sum();
                out[k] = sum.abs();
            }
        }
    }
}

fn require_two_topics(method: &'static str, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::MethodInapplicable {
            method,
            reason: "needs at least two topics (the deviation weight is an empty sum)".into(),
        });
    }
    Ok(())
}

/// φ^SDW_kv = sqrt(Σ_{i≠k} (φ_kv − φ_iv)²) · φ_kv
pub fn score_sdw(phi: &TopicWordMatrix, reading: DeviationReading) -> Result<TopicWordMatrix> {
    require_phi(phi)?;
    let (k, v) = (phi.topics(), phi.vocab_size());
    require_two_topics("sdw", k)?;
    let mut scores = vec![0.0; k * v];
    let mut column = vec![0.0; k];
    let mut weight = vec![0.0; k];
    for w in 0..v {
        for (t, c) in column.iter_mut().enumerate() {
            *c = phi.get(t, w);
        }
        deviation_weights(&column, reading, &mut weight);
        for t in 0..k {
            scores[t * v + w] = weight[t] * column[t];
        }
    }
    Ok(TopicWordMatrix::new(scores, ScoreKind::Sdw, phi.counts().clone()))
}

/// φ^SDWTS_kv = sqrt(Σ_{i≠k} (N_kv − N_iv)²) · φ_kv, the count form of the
/// topic-size weighted deviation.
pub fn score_sdwts(counts: &Arc<CountSnapshot>, reading: DeviationReading) -> Result<TopicWordMatrix> {
    let (k, v) = (counts.topics(), counts.vocab_size());
    require_two_topics("sdwts", k)?;
    let mut scores = vec![0.0; k * v];
    let mut column = vec![0i64; k];
    for w in 0..v {
        for (t, c) in column.iter_mut().enumerate() {
            *c = counts.n_kv(t, w) as i64;
        }
        for t in 0..k {
            let x = column[t];
            // integer arithmetic keeps equal-count columns at exactly zero
            let weight = match reading {
                DeviationReading::PerTerm => {
                    let sum: i128 = column.iter().map(|&y| ((x - y) as i128).pow(2)).sum();
                    (sum as f64).sqrt()
                }
                DeviationReading::SquaredSum => {
                    let sum: i128 = column.iter().map(|&y| (x - y) as i128).sum();
                    sum.unsigned_abs() as f64
                }
            };
            scores[t * v + w] = weight * counts.phi(t, w);
        }
    }
    Ok(TopicWordMatrix::new(scores, ScoreKind::Sdwts, counts.clone()))
}

/// 2×2 contingency χ² for topic membership versus word identity:
/// a = N_kv, b = N_k − N_kv, c = N_v − N_kv, d = N − N_k − N_v + N_kv.
///
/// Returns 0 when any marginal is zero.
pub fn chi_square_cell(n_kv: u64, n_k: u64, n_v: u64, n: u64) -> Result<f64> {
    let (a, nk, nv, n) = (n_kv as i128, n_k as i128, n_v as i128, n as i128);
    let (b, c, d) = (nk - a, nv - a, n - nk - nv + a);
    if a < 0 || b < 0 || c < 0 || d < 0 {
        return Err(Error::InternalState(format!(
            "negative contingency cell for N_kv={n_kv} N_k={n_k} N_v={n_v} N={n}"
        )));
    }
    let margins = [a + b, c + d, a + c, b + d];
    if margins.contains(&0) {
        return Ok(0.0);
    }
    let det = (a * d - b * c) as f64;
    let denom = margins.iter().map(|&m| m as f64).product::<f64>();
    Ok(n as f64 * det * det / denom)
}

pub fn score_chi(counts: &Arc<CountSnapshot>) -> Result<TopicWordMatrix> {
    let (k, v) = (counts.topics(), counts.vocab_size());
    let n = counts.n_total();
    if n == 0 {
        return Err(Error::Argument("chi-square needs a non-empty count table".into()));
    }
    let mut scores = Vec::with_capacity(k * v);
    for t in 0..k {
        for w in 0..v {
            scores.push(chi_square_cell(
                counts.n_kv(t, w) as u64,
                counts.n_k(t),
                counts.n_v(w),
                n,
            )?);
        }
    }
    Ok(TopicWordMatrix::new(scores, ScoreKind::Chi, counts.clone()))
}

/// Scores every topic under `method`, starting from the φ matrix.
pub fn score(method: Method, phi: &TopicWordMatrix, reading: DeviationReading) -> Result<TopicWordMatrix> {
    match method {
        Method::Norm => score_norm(phi),
        Method::Sdw => score_sdw(phi, reading),
        Method::Sdwts => score_sdwts(phi.counts(), reading),
        Method::Chi => score_chi(phi.counts()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedWord {
    pub word: u32,
    pub score: f64,
}

/// Top-M words of one topic under one representation.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedTopic {
    pub topic_id: usize,
    pub method: Method,
    pub words: Vec<RankedWord>,
}

impl RankedTopic {
    pub fn word_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().map(|w| w.word)
    }

    /// 1-based rank of `word`, if listed.
    pub fn rank_of(&self, word: u32) -> Option<usize> {
        self.words.iter().position(|w| w.word == word).map(|i| i + 1)
    }
}

fn method_of(kind: ScoreKind) -> Method {
    match kind {
        ScoreKind::Phi => Method::Norm,
        ScoreKind::Sdw => Method::Sdw,
        ScoreKind::Sdwts => Method::Sdwts,
        ScoreKind::Chi => Method::Chi,
    }
}

/// The `m` highest-scoring words of every topic. Ties go to the larger
/// N_kv, then the smaller word id.
pub fn top_m(scores: &TopicWordMatrix, m: usize) -> Result<Vec<RankedTopic>> {
    let v = scores.vocab_size();
    if m == 0 || m > v {
        return Err(Error::Argument(format!("top-m must be in 1..={v}, got {m}")));
    }
    let counts = scores.counts();
    let method = method_of(scores.kind());
    let ranked = (0..scores.topics())
        .map(|k| {
            let row = scores.row(k);
            let n_kv = counts.topic_row(k);
            let cmp = |&a: &u32, &b: &u32| {
                row[b as usize]
                    .total_cmp(&row[a as usize])
                    .then(n_kv[b as usize].cmp(&n_kv[a as usize]))
                    .then(a.cmp(&b))
            };
            let mut ids: Vec<u32> = (0..v as u32).collect();
            if m < v {
                ids.select_nth_unstable_by(m - 1, cmp);
                ids.truncate(m);
            }
            ids.sort_unstable_by(cmp);
            RankedTopic {
                topic_id: k,
                method,
                words: ids
                    .into_iter()
                    .map(|w| RankedWord {
                        word: w,
                        score: row[w as usize],
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(ranked)
}

/// `topic_id\tmethod\trank\tword\tscore`, ranks starting at 1.
pub fn write_ranked_tsv<W: Write>(mut out: W, topics: &[RankedTopic], vocab: &Vocabulary) -> std::io::Result<()> {
    for topic in topics {
        for (r, w) in topic.words.iter().enumerate() {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                topic.topic_id,
                topic.method,
                r + 1,
                vocab.word(w.word),
                w.score
            )?;
        }
    }
    out.flush()
}

pub fn read_ranked_tsv<R: BufRead>(input: R, vocab: &Vocabulary) -> Result<Vec<RankedTopic>> {
    const SECTION: &str = "ranked topics";
    let mut topics: Vec<RankedTopic> = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let n = i + 1;
        let line = line.map_err(|e| Error::parse(n, SECTION, e.to_string()))?;
        if line.is_empty() || (n == 1 && line.starts_with("topic_id\t")) {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [topic, method, rank, word, score] = fields[..] else {
            return Err(Error::parse(n, SECTION, "expected 5 tab-separated fields"));
        };
        let bad = |what: &str| Error::parse(n, SECTION, format!("bad {what}"));
        let topic_id: usize = topic.parse().map_err(|_| bad("topic id"))?;
        let method: Method = method.parse().map_err(|_| bad("method"))?;
        let rank: usize = rank.parse().map_err(|_| bad("rank"))?;
        let word = vocab.id(word).ok_or_else(|| bad("word (not in vocabulary)"))?;
        let score: f64 = score.parse().map_err(|_| bad("score"))?;

        let continues = topics
            .last()
            .is_some_and(|t| t.topic_id == topic_id && t.method == method);
        if !continues {
            topics.push(RankedTopic {
                topic_id,
                method,
                words: Vec::new(),
            });
        }
        let current = topics.last_mut().expect("pushed above");
        if rank != current.words.len() + 1 {
            return Err(Error::parse(n, SECTION, format!("rank {rank} out of sequence")));
        }
        current.words.push(RankedWord { word, score });
    }
    Ok(topics)
}
