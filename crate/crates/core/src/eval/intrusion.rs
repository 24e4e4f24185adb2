//! Automated word-intrusion evaluation.
//!
//! A task shows a topic's top six words with one of them swapped for an
//! intruder. The detector here is a stand-in for a human judge: it picks
//! the word with the weakest mean co-document association to the others,
//! using the same D(v) and D(v1, v2) statistics as the coherence metric.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::DocFreqIndex;
use crate::error::{Error, Result};
use crate::matrix::Method;
use crate::rerank::RankedTopic;

pub const TASK_SIZE: usize = 6;
/// 1-based rank window that S_SELF intruders come from.
pub const SELF_RANKS: std::ops::RangeInclusive<usize> = 11..=100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntruderPattern {
    /// Anywhere in the vocabulary outside the topic's own top six.
    Vocabulary,
    /// Other topics' top six words.
    OtherTopics,
    /// The same topic's words ranked 11 through 100.
    SameTopic,
}

impl IntruderPattern {
    pub const ALL: [IntruderPattern; 3] = [Self::Vocabulary, Self::OtherTopics, Self::SameTopic];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Vocabulary => "s_voc",
            Self::OtherTopics => "s_topic",
            Self::SameTopic => "s_self",
        }
    }

    /// Shortest ranked list the pattern can work with.
    pub fn min_list_len(self) -> usize {
        match self {
            Self::SameTopic => *SELF_RANKS.end(),
            _ => TASK_SIZE,
        }
    }
}

impl fmt::Display for IntruderPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IntruderPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s_voc" | "voc" => Ok(Self::Vocabulary),
            "s_topic" | "topic" => Ok(Self::OtherTopics),
            "s_self" | "self" => Ok(Self::SameTopic),
            _ => Err(Error::Argument(format!(
                "unknown intrusion pattern {s:?} (expected s_voc, s_topic or s_self)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntrusionTask {
    pub topic_id: usize,
    pub method: Method,
    /// Presentation order.
    pub shown: [u32; TASK_SIZE],
    pub true_intruder: u32,
    /// The top-six word the intruder replaced.
    pub removed: u32,
    pub pattern: IntruderPattern,
    pub seed: u64,
    /// 1-based rank of the intruder in its own topic, for S_SELF tasks.
    pub intruder_rank: Option<usize>,
}

/// One task per topic. All randomness comes from `seed`.
pub fn make_intrusion_tasks(
    ranked: &[RankedTopic],
    pattern: IntruderPattern,
    vocab_size: usize,
    seed: u64,
) -> Result<Vec<IntrusionTask>> {
    let need = pattern.min_list_len();
    if let Some(short) = ranked.iter().find(|t| t.words.len() < need) {
        return Err(Error::Argument(format!(
            "{pattern} needs ranked lists of at least {need} words, topic {} has {}",
            short.topic_id,
            short.words.len()
        )));
    }
    let tops: Vec<Vec<u32>> = ranked
        .iter()
        .map(|t| t.word_ids().take(TASK_SIZE).collect())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tasks = Vec::with_capacity(ranked.len());
    for (i, topic) in ranked.iter().enumerate() {
        let top = &tops[i];
        let removed_at = rng.random_range(0..TASK_SIZE);

        let (intruder, intruder_rank) = match pattern {
            IntruderPattern::Vocabulary => {
                if vocab_size <= TASK_SIZE {
                    return Err(Error::Generation(format!(
                        "vocabulary of {vocab_size} words leaves no intruder candidates"
                    )));
                }
                let w = loop {
                    let w = rng.random_range(0..vocab_size as u32);
                    if !top.contains(&w) {
                        break w;
                    }
                };
                (w, None)
            }
            IntruderPattern::OtherTopics => {
                let pool: Vec<u32> = tops
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .flat_map(|(_, t)| t.iter().copied())
                    .filter(|w| !top.contains(w))
                    .collect::<BTreeSet<u32>>()
                    .into_iter()
                    .collect();
                if pool.is_empty() {
                    return Err(Error::Generation(format!(
                        "no other-topic words available for topic {}",
                        topic.topic_id
                    )));
                }
                (pool[rng.random_range(0..pool.len())], None)
            }
            IntruderPattern::SameTopic => {
                let lo = *SELF_RANKS.start() - 1;
                let hi = *SELF_RANKS.end();
                let r = rng.random_range(lo..hi);
                (topic.words[r].word, Some(r + 1))
            }
        };

        let mut shown = [0u32; TASK_SIZE];
        shown.copy_from_slice(top);
        shown[removed_at] = intruder;
        shown.shuffle(&mut rng);
        tasks.push(IntrusionTask {
            topic_id: topic.topic_id,
            method: topic.method,
            shown,
            true_intruder: intruder,
            removed: top[removed_at],
            pattern,
            seed,
            intruder_rank,
        });
    }
    Ok(tasks)
}

/// ½[log((D(a,b)+ε)/D(b)) + log((D(a,b)+ε)/D(a))]
fn association(index: &DocFreqIndex, a: u32, b: u32, epsilon: f64) -> Result<f64> {
    let joint = index.codf(a, b)? as f64 + epsilon;
    Ok(0.5 * ((joint / index.df(b) as f64).ln() + (joint / index.df(a) as f64).ln()))
}

/// The word with the lowest mean association to the rest; ties go to the
/// lower corpus frequency, then the lower id. Presentation order does not
/// affect the result.
pub fn detect_in_words(words: &[u32], index: &DocFreqIndex, epsilon: f64) -> Result<u32> {
    if words.len() < 2 {
        return Err(Error::Argument("need at least two words to detect an intruder".into()));
    }
    let mut sorted = words.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|p| p[0] == p[1]) {
        return Err(Error::Argument("intrusion words must be distinct".into()));
    }
    if let Some(&w) = sorted.iter().find(|&&w| index.df(w) == 0) {
        return Err(Error::Argument(format!("word {w} never occurs in the corpus")));
    }

    let mut best: Option<(f64, u64, u32)> = None;
    for &w in &sorted {
        let mut sum = 0.0;
        for &other in sorted.iter().filter(|&&o| o != w) {
            sum += association(index, w, other, epsilon)?;
        }
        let key = (sum / (sorted.len() - 1) as f64, index.term_freq(w), w);
        let better = match best {
            None => true,
            Some(b) => key.0.total_cmp(&b.0).then(key.1.cmp(&b.1)).then(key.2.cmp(&b.2)).is_lt(),
        };
        if better {
            best = Some(key);
        }
    }
    Ok(best.expect("at least two words").2)
}

pub fn detect_intruder(task: &IntrusionTask, index: &DocFreqIndex, epsilon: f64) -> Result<u32> {
    detect_in_words(&task.shown, index, epsilon)
}

/// Fraction of (detected, true) pairs that agree.
pub fn intrusion_accuracy(results: &[(u32, u32)]) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::Argument("no intrusion results".into()));
    }
    let hits = results.iter().filter(|(d, t)| d == t).count();
    Ok(hits as f64 / results.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankBucket {
    /// Inclusive 1-based rank range.
    pub lo: usize,
    pub hi: usize,
    pub correct: usize,
    pub total: usize,
}

impl RankBucket {
    pub fn accuracy(&self) -> Option<f64> {
        (self.total > 0).then(|| self.correct as f64 / self.total as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodAccuracy {
    pub method: Method,
    pub per_repeat: Vec<f64>,
    pub mean: f64,
    /// Accuracy by intruder rank in steps of ten, for S_SELF.
    pub buckets: Vec<RankBucket>,
}

impl MethodAccuracy {
    /// Mean of the per-bucket accuracies over non-empty buckets.
    pub fn bucket_mean(&self) -> Option<f64> {
        let accs: Vec<f64> = self.buckets.iter().filter_map(RankBucket::accuracy).collect();
        (!accs.is_empty()).then(|| accs.iter().sum::<f64>() / accs.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub pattern: IntruderPattern,
    pub repeats: usize,
    pub methods: Vec<MethodAccuracy>,
}

fn self_buckets() -> Vec<RankBucket> {
    SELF_RANKS
        .step_by(10)
        .map(|lo| RankBucket {
            lo,
            hi: lo + 9,
            correct: 0,
            total: 0,
        })
        .collect()
}

/// Repeat `r` uses seed `seed + r`; every method sees the same seed schedule.
pub fn run_intrusion_benchmark(
    ranked: &[(Method, Vec<RankedTopic>)],
    pattern: IntruderPattern,
    repeats: usize,
    index: &DocFreqIndex,
    epsilon: f64,
    seed: u64,
) -> Result<BenchmarkReport> {
    if repeats == 0 {
        return Err(Error::Argument("repeats must be >= 1".into()));
    }
    let vocab_size = index.vocab_size();
    let mut methods = Vec::with_capacity(ranked.len());
    for (method, topics) in ranked {
        let mut per_repeat = Vec::with_capacity(repeats);
        let mut buckets = if pattern == IntruderPattern::SameTopic {
            self_buckets()
        } else {
            Vec::new()
        };
        for r in 0..repeats {
            let repeat_seed = seed.wrapping_add(r as u64);
            let tasks = make_intrusion_tasks(topics, pattern, vocab_size, repeat_seed)?;
            let mut results = Vec::with_capacity(tasks.len());
            for task in &tasks {
                let detected = detect_intruder(task, index, epsilon)?;
                let hit = detected == task.true_intruder;
                if let Some(rank) = task.intruder_rank {
                    let b = &mut buckets[(rank - SELF_RANKS.start()) / 10];
                    b.total += 1;
                    b.correct += hit as usize;
                }
                results.push((detected, task.true_intruder));
            }
            let acc = intrusion_accuracy(&results)?;
            log::info!("{method} {pattern} repeat {r} accuracy {acc:.4}");
            per_repeat.push(acc);
        }
        let mean = per_repeat.iter().sum::<f64>() / repeats as f64;
        methods.push(MethodAccuracy {
            method: *method,
            per_repeat,
            mean,
            buckets,
        });
    }
    Ok(BenchmarkReport {
        pattern,
        repeats,
        methods,
    })
}

/// `method,pattern,repeat,accuracy`: one row per repeat, a `mean` summary
/// row per method and, for S_SELF, one `ranks_<lo>_<hi>` row per bucket.
pub fn write_benchmark_csv<W: Write>(mut out: W, reports: &[BenchmarkReport]) -> std::io::Result<()> {
    writeln!(out, "method,pattern,repeat,accuracy")?;
    for report in reports {
        for m in &report.methods {
            for (r, acc) in m.per_repeat.iter().enumerate() {
                writeln!(out, "{},{},{},{}", m.method, report.pattern, r, acc)?;
            }
            writeln!(out, "{},{},mean,{}", m.method, report.pattern, m.mean)?;
            for b in &m.buckets {
                match b.accuracy() {
                    Some(acc) => writeln!(out, "{},{},ranks_{}_{},{}", m.method, report.pattern, b.lo, b.hi, acc)?,
                    None => writeln!(out, "{},{},ranks_{}_{},NA", m.method, report.pattern, b.lo, b.hi)?,
                }
            }
        }
    }
    out.flush()
}
