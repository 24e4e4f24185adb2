//! LDA trained by collapsed Gibbs sampling.

mod model_file;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use model_file::{load_model, read_model, save_model, write_model, RNG_NAME};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::matrix::{CountSnapshot, TopicWordMatrix};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct LdaConfig {
    pub topics: usize,
    /// Symmetric document-topic prior.
    pub alpha: f64,
    /// Symmetric topic-word prior.
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl LdaConfig {
    /// Defaults: α = 50/K, β = 0.01, 500 sweeps, seed 0.
    pub fn new(topics: usize) -> Self {
        Self {
            topics,
            alpha: 50.0 / topics.max(1) as f64,
            beta: 0.01,
            iterations: 500,
            burn_in: 0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.topics == 0 {
            return fail("number of topics must be >= 1".into());
        }
        if self.topics > u32::MAX as usize {
            return fail(format!("too many topics: {}", self.topics));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return fail(format!("alpha must be > 0, got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return fail(format!("beta must be > 0, got {}", self.beta));
        }
        if self.iterations == 0 {
            return fail("iterations must be >= 1".into());
        }
        if self.burn_in >= self.iterations {
            return fail(format!(
                "burn-in ({}) must be smaller than iterations ({})",
                self.burn_in, self.iterations
            ));
        }
        Ok(())
    }
}

/// Topic assignments plus the count arrays derived from them.
///
/// Word-topic counts are stored word-major (`V×K`) so the per-token
/// conditional reads one contiguous row.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsState {
    topics: usize,
    vocab_size: usize,
    assignments: Vec<Vec<u32>>,
    word_topic: Vec<u32>,
    doc_topic: Vec<u32>,
    topic_totals: Vec<u32>,
    rng: ChaCha8Rng,
    seed: u64,
    sweeps_done: usize,
}

impl GibbsState {
    /// Assigns every token a topic drawn uniformly from the seeded RNG.
    pub fn init(corpus: &Corpus, config: &LdaConfig) -> Result<Self> {
        config.validate()?;
        if corpus.n_docs() == 0 || corpus.vocab_size() == 0 {
            return Err(Error::Config(
                "corpus is empty (no documents or empty vocabulary)".into(),
            ));
        }
        let k = config.topics;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let assignments = corpus
            .docs()
            .iter()
            .map(|doc| doc.iter().map(|_| rng.random_range(0..k as u32)).collect())
            .collect();
        Self::from_assignments(corpus, k, assignments, rng, config.seed, 0)
    }

    /// Starts from given assignments, with the RNG seeded from the config.
    pub fn with_assignments(corpus: &Corpus, config: &LdaConfig, assignments: Vec<Vec<u32>>) -> Result<Self> {
        config.validate()?;
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Self::from_assignments(corpus, config.topics, assignments, rng, config.seed, 0)
    }

    pub(crate) fn from_assignments(
        corpus: &Corpus,
        topics: usize,
        assignments: Vec<Vec<u32>>,
        rng: ChaCha8Rng,
        seed: u64,
        sweeps_done: usize,
    ) -> Result<Self> {
        let v = corpus.vocab_size();
        let (word_topic, doc_topic, topic_totals) = tally(corpus.docs(), &assignments, topics, v)?;
        Ok(Self {
            topics,
            vocab_size: v,
            assignments,
            word_topic,
            doc_topic,
            topic_totals,
            rng,
            seed,
            sweeps_done,
        })
    }

    pub fn topics(&self) -> usize {
        self.topics
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn n_docs(&self) -> usize {
        self.assignments.len()
    }

    pub fn assignments(&self) -> &[Vec<u32>] {
        &self.assignments
    }

    pub fn n_kv(&self, k: usize, v: usize) -> u32 {
        self.word_topic[v * self.topics + k]
    }

    pub fn n_dk(&self, d: usize, k: usize) -> u32 {
        self.doc_topic[d * self.topics + k]
    }

    pub fn n_k(&self, k: usize) -> u32 {
        self.topic_totals[k]
    }

    /// Counts of word `v` in every topic.
    pub fn word_topic_row(&self, v: u32) -> &[u32] {
        let k = self.topics;
        &self.word_topic[v as usize * k..(v as usize + 1) * k]
    }

    pub fn doc_topic_row(&self, d: usize) -> &[u32] {
        &self.doc_topic[d * self.topics..(d + 1) * self.topics]
    }

    pub fn sweeps_done(&self) -> usize {
        self.sweeps_done
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Position of the RNG stream, enough to resume it from the seed.
    pub fn rng_position(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Full recount of the assignments against every count array.
    pub fn verify(&self, corpus: &Corpus) -> Result<()> {
        let (wt, dt, tt) = tally(corpus.docs(), &self.assignments, self.topics, self.vocab_size)?;
        if wt != self.word_topic {
            return Err(Error::InternalState("topic-word counts differ from assignments".into()));
        }
        if dt != self.doc_topic {
            return Err(Error::InternalState("document-topic counts differ from assignments".into()));
        }
        if tt != self.topic_totals {
            return Err(Error::InternalState("topic totals differ from assignments".into()));
        }
        Ok(())
    }

    /// One pass over every token in document order, resampling each topic
    /// from its collapsed conditional
    /// `(N_kv + β)(N_dk + α) / (N_k + Vβ)` with the token itself excluded.
    pub fn sweep(&mut self, corpus: &Corpus, config: &LdaConfig) -> Result<()> {
        if corpus.n_docs() != self.assignments.len() || corpus.vocab_size() != self.vocab_size {
            return Err(Error::InternalState("state does not match corpus shape".into()));
        }
        let k = self.topics;
        let (alpha, beta) = (config.alpha, config.beta);
        let v_beta = self.vocab_size as f64 * beta;
        let mut cdf = vec![0.0f64; k];

        let Self {
            assignments,
            word_topic,
            doc_topic,
            topic_totals,
            rng,
            ..
        } = self;

        for (d, (doc, z)) in corpus.docs().iter().zip(assignments.iter_mut()).enumerate() {
            if doc.len() != z.len() {
                return Err(Error::InternalState(format!("document {d} length mismatch")));
            }
            let dt = &mut doc_topic[d * k..(d + 1) * k];
            for (&w, zi) in doc.iter().zip(z.iter_mut()) {
                let old = *zi as usize;
                let wt = &mut word_topic[w as usize * k..(w as usize + 1) * k];
                if wt[old] == 0 || dt[old] == 0 || topic_totals[old] == 0 {
                    return Err(Error::InternalState(format!(
                        "negative count while removing token of word {w} in document {d}"
                    )));
                }
                wt[old] -= 1;
                dt[old] -= 1;
                topic_totals[old] -= 1;

                let mut total = 0.0;
                for t in 0..k {
                    total += (wt[t] as f64 + beta) * (dt[t] as f64 + alpha)
                        / (topic_totals[t] as f64 + v_beta);
                    cdf[t] = total;
                }
                let u = rng.random::<f64>() * total;
                let new = cdf.iter().position(|&c| u < c).unwrap_or(k - 1);

                wt[new] += 1;
                dt[new] += 1;
                topic_totals[new] += 1;
                *zi = new as u32;
            }
        }
        self.sweeps_done += 1;
        Ok(())
    }

    /// The unnormalized collapsed conditional for one token, with that token
    /// removed from the counts. Exposed for testing the sampler.
    pub fn conditional(&self, corpus: &Corpus, config: &LdaConfig, d: usize, n: usize) -> Vec<f64> {
        let k = self.topics;
        let w = corpus.docs()[d][n] as usize;
        let old = self.assignments[d][n] as usize;
        let v_beta = self.vocab_size as f64 * config.beta;
        (0..k)
            .map(|t| {
                let own = (t == old) as u32;
                let nkv = self.word_topic[w * k + t] - own;
                let ndk = self.doc_topic[d * k + t] - own;
                let nk = self.topic_totals[t] - own;
                (nkv as f64 + config.beta) * (ndk as f64 + config.alpha) / (nk as f64 + v_beta)
            })
            .collect()
    }

    pub fn count_snapshot(&self, beta: f64) -> CountSnapshot {
        CountSnapshot::from_state(self, beta)
    }
}

fn tally(
    docs: &[Vec<u32>],
    assignments: &[Vec<u32>],
    topics: usize,
    vocab_size: usize,
) -> Result<(Vec<u32>, Vec<u32>, Vec<u32>)> {
    if docs.len() != assignments.len() {
        return Err(Error::InternalState(format!(
            "{} documents but {} assignment rows",
            docs.len(),
            assignments.len()
        )));
    }
    let mut word_topic = vec![0u32; vocab_size * topics];
    let mut doc_topic = vec![0u32; docs.len() * topics];
    let mut topic_totals = vec![0u32; topics];
    for (d, (doc, z)) in docs.iter().zip(assignments).enumerate() {
        if doc.len() != z.len() {
            return Err(Error::InternalState(format!(
                "document {d} has {} tokens but {} assignments",
                doc.len(),
                z.len()
            )));
        }
        for (&w, &t) in doc.iter().zip(z) {
            let t = t as usize;
            if t >= topics {
                return Err(Error::InternalState(format!("topic id {t} out of range")));
            }
            word_topic[w as usize * topics + t] += 1;
            doc_topic[d * topics + t] += 1;
            topic_totals[t] += 1;
        }
    }
    Ok((word_topic, doc_topic, topic_totals))
}

/// φ_kv = (N_kv + β) / (N_k + Vβ)
pub fn estimate_phi(state: &GibbsState, config: &LdaConfig) -> TopicWordMatrix {
    TopicWordMatrix::phi(Arc::new(state.count_snapshot(config.beta)))
}

/// Runs `n` sweeps, logging throughput. With `verify` set, a full recount
/// runs after every sweep.
pub fn run_sweeps(
    state: &mut GibbsState,
    corpus: &Corpus,
    config: &LdaConfig,
    n: usize,
    verify: bool,
) -> Result<()> {
    let tokens = corpus.n_tokens() as f64;
    let report_every = (n / 10).max(1);
    for i in 0..n {
        let start = Instant::now();
        state.sweep(corpus, config)?;
        if verify {
            state.verify(corpus)?;
        }
        let rate = tokens / start.elapsed().as_secs_f64().max(1e-9);
        log::debug!("sweep {} tokens/sec {:.0}", state.sweeps_done(), rate);
        if (i + 1) % report_every == 0 || i + 1 == n {
            log::info!(
                "seed {} sweep {}/{} tokens/sec {:.0}",
                state.seed(),
                state.sweeps_done(),
                config.iterations.max(state.sweeps_done()),
                rate
            );
        }
    }
    Ok(())
}

/// Initializes, runs `config.iterations` sweeps and estimates φ from the
/// final sample.
pub fn train(corpus: &Corpus, config: &LdaConfig) -> Result<(GibbsState, TopicWordMatrix)> {
    let mut state = GibbsState::init(corpus, config)?;
    let verify = log::log_enabled!(log::Level::Debug);
    run_sweeps(&mut state, corpus, config, config.iterations, verify)?;
    let phi = estimate_phi(&state, config);
    Ok((state, phi))
}
