//! Command-line front end: corpus ingestion, training, reranked topic lists,
//! coherence and intrusion benchmarks, and one-shot reproduction runs.

pub mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use topicrank::eval::{
    coherence_report, run_intrusion_benchmark, write_benchmark_csv, write_coherence_csv, IntruderPattern,
    DEFAULT_EPSILON,
};
use topicrank::corpus::load_stopwords;
use topicrank::lda::{load_model, run_sweeps, save_model};
use topicrank::rerank::{score, top_m, write_ranked_tsv, DeviationReading};
use topicrank::{
    estimate_phi, Corpus, DocFreqIndex, Error, GibbsState, LdaConfig, Method, RankedTopic,
    Result, Tracked,
};

pub use config::ExperimentConfig;

/// Label carried into intrusion output: detection is automatic, not human.
pub const DETECTOR: &str = "co-document association argmin";

#[derive(Debug, Parser)]
#[command(name = "topicrank", version, about = "LDA topics with reranked top-word lists")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tokenize one-document-per-line text files into a corpus file.
    Ingest(IngestArgs),
    /// Train LDA by collapsed Gibbs sampling and save the model.
    Train(TrainArgs),
    /// Write the top-M words of every topic under each method (TSV).
    Topics(TopicsArgs),
    /// Coherence of every topic's top-M words under each method (CSV).
    Coherence(CoherenceArgs),
    /// Word-intrusion benchmark with the automatic detector (CSV).
    Intrude(IntrudeArgs),
    /// Run ingest, train, topics, coherence and intrude from one config file.
    Repro(ReproArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Text files, one document per line.
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
    pub corpus: Vec<PathBuf>,
    /// Stopword file, one word per line.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub min_count: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Corpus file written by `ingest`.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub topics: usize,
    /// Defaults to 50 / topics.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub beta: f64,
    #[arg(long, default_value_t = 500)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub model: PathBuf,
    /// Independent chains with seeds seed, seed+1, ...; each writes
    /// `<model>.chain<i>`.
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value = "norm,sdw,sdwts,chi", value_delimiter = ',')]
    pub methods: Vec<Method>,
    /// How SDW/SDWTS combine per-topic differences: per-term or squared-sum.
    #[arg(long, default_value = "per-term")]
    pub deviation: DeviationReading,
}

#[derive(Debug, Args)]
pub struct TopicsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 20)]
    pub top_m: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoherenceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 10)]
    pub top_m: usize,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IntrudeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// s_voc, s_topic and/or s_self.
    #[arg(long, default_value = "s_voc", value_delimiter = ',')]
    pub pattern: Vec<IntruderPattern>,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproArgs {
    /// Experiment config file.
    pub config: PathBuf,
    /// Overrides the config's output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Short category name used in error lines.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Io { .. } => "io",
        Error::Config(_) => "config",
        Error::Argument(_) => "argument",
        Error::Parse { .. } => "parse",
        Error::InternalState(_) => "internal",
        Error::MethodInapplicable { .. } => "method",
        Error::MetricUndefined { .. } => "metric",
        Error::Generation(_) => "generation",
        Error::UntrackedPair(..) => "untracked",
    }
}

/// Missing or unreadable paths exit with 2, everything else with 1.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => 2,
        _ => 1,
    }
}

/// Writes `bytes` to a temporary file beside `path`, then renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let io = |e: std::io::Error| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::Io {
                    path: "<stdout>".into(),
                    source: e,
                })
        }
    }
}

pub fn ingest(paths: &[PathBuf], stopwords: Option<&Path>, min_count: u64) -> Result<Corpus> {
    let stop = stopwords.map(load_stopwords).transpose()?;
    let (corpus, summary) = Corpus::ingest(paths, stop.as_ref(), min_count)?;
    log::info!(
        "ingested {} documents, {} tokens, vocabulary {} ({} types dropped, {} empty documents)",
        summary.n_docs,
        corpus.n_tokens(),
        corpus.vocab_size(),
        summary.n_types_dropped,
        summary.empty_docs.len()
    );
    Ok(corpus)
}

pub fn corpus_bytes(corpus: &Corpus) -> Vec<u8> {
    let mut buf = Vec::new();
    corpus.write_to(&mut buf).expect("writing to memory");
    buf
}

pub fn train(corpus: &Corpus, config: &LdaConfig) -> Result<GibbsState> {
    config.validate()?;
    let mut state = GibbsState::init(corpus, config)?;
    let verify = log::log_enabled!(log::Level::Debug);
    run_sweeps(&mut state, corpus, config, config.iterations, verify)?;
    Ok(state)
}

/// Trains `chains` independent chains in parallel, chain i with seed + i.
pub fn train_chains(corpus: &Corpus, config: &LdaConfig, chains: usize) -> Result<Vec<GibbsState>> {
    if chains == 0 {
        return Err(Error::Argument("chains must be >= 1".into()));
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..chains)
            .map(|i| {
                let cfg = LdaConfig {
                    seed: config.seed.wrapping_add(i as u64),
                    ..config.clone()
                };
                s.spawn(move || train(corpus, &cfg))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("training thread panicked"))
            .collect()
    })
}

/// Top-`m` lists of every topic, for each method in order.
pub fn rank(
    state: &GibbsState,
    config: &LdaConfig,
    methods: &[Method],
    m: usize,
    deviation: DeviationReading,
) -> Result<Vec<(Method, Vec<RankedTopic>)>> {
    let phi = estimate_phi(state, config);
    methods
        .iter()
        .map(|&method| Ok((method, top_m(&score(method, &phi, deviation)?, m)?)))
        .collect()
}

pub fn topics_bytes(ranked: &[(Method, Vec<RankedTopic>)], corpus: &Corpus) -> Vec<u8> {
    let mut buf = b"topic_id\tmethod\trank\tword\tscore\n".to_vec();
    for (_, topics) in ranked {
        write_ranked_tsv(&mut buf, topics, corpus.vocab()).expect("writing to memory");
    }
    buf
}

pub fn coherence_bytes(
    ranked: &[(Method, Vec<RankedTopic>)],
    m: usize,
    index: &DocFreqIndex,
    epsilon: f64,
) -> Vec<u8> {
    let rows: Vec<_> = ranked
        .iter()
        .flat_map(|(_, topics)| coherence_report(topics, m, index, epsilon))
        .collect();
    for row in &rows {
        if let Err(e) = &row.value {
            log::warn!("topic {} ({}): {e}", row.topic_id, row.method);
        }
    }
    let mut buf = Vec::new();
    write_coherence_csv(&mut buf, &rows).expect("writing to memory");
    buf
}

pub fn intrusion_bytes(
    ranked: &[(Method, Vec<RankedTopic>)],
    patterns: &[IntruderPattern],
    repeats: usize,
    index: &DocFreqIndex,
    epsilon: f64,
    seed: u64,
) -> Result<Vec<u8>> {
    log::info!("intruder detector: {DETECTOR}");
    let reports = patterns
        .iter()
        .map(|&p| run_intrusion_benchmark(ranked, p, repeats, index, epsilon, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut buf = Vec::new();
    write_benchmark_csv(&mut buf, &reports).expect("writing to memory");
    Ok(buf)
}

/// Longest ranked list the patterns need, capped at the vocabulary size.
fn intrusion_list_len(patterns: &[IntruderPattern], vocab_size: usize) -> usize {
    patterns
        .iter()
        .map(|p| p.min_list_len())
        .max()
        .unwrap_or(0)
        .min(vocab_size)
}

fn load(args: &ModelArgs) -> Result<(Corpus, GibbsState, LdaConfig)> {
    let corpus = Corpus::load(&args.corpus)?;
    let (state, config) = load_model(&args.model, &corpus)?;
    Ok((corpus, state, config))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(a) => {
            let corpus = ingest(&a.corpus, a.stopwords.as_deref(), a.min_count)?;
            write_atomic(&a.out, &corpus_bytes(&corpus))
        }
        Command::Train(a) => {
            let corpus = Corpus::load(&a.corpus)?;
            let mut config = LdaConfig::new(a.topics);
            config.alpha = a.alpha.unwrap_or(config.alpha);
            config.beta = a.beta;
            config.iterations = a.iters;
            config.seed = a.seed;
            config.validate()?;
            let states = train_chains(&corpus, &config, a.chains)?;
            if a.chains == 1 {
                return save_model(&states[0], &config, &a.model);
            }
            for (i, state) in states.iter().enumerate() {
                let mut name = a.model.clone().into_os_string();
                name.push(format!(".chain{i}"));
                save_model(state, &config, Path::new(&name))?;
            }
            Ok(())
        }
        Command::Topics(a) => {
            let (corpus, state, config) = load(&a.model)?;
            let ranked = rank(&state, &config, &a.model.methods, a.top_m, a.model.deviation)?;
            emit(a.out.as_deref(), &topics_bytes(&ranked, &corpus))
        }
        Command::Coherence(a) => {
            let (corpus, state, config) = load(&a.model)?;
            let ranked = rank(&state, &config, &a.model.methods, a.top_m, a.model.deviation)?;
            let index = DocFreqIndex::build(&corpus, Tracked::All);
            emit(a.out.as_deref(), &coherence_bytes(&ranked, a.top_m, &index, a.epsilon))
        }
        Command::Intrude(a) => {
            let (corpus, state, config) = load(&a.model)?;
            let m = intrusion_list_len(&a.pattern, corpus.vocab_size());
            let ranked = rank(&state, &config, &a.model.methods, m, a.model.deviation)?;
            let index = DocFreqIndex::build(&corpus, Tracked::All);
            let bytes = intrusion_bytes(&ranked, &a.pattern, a.repeats, &index, a.epsilon, a.seed)?;
            emit(a.out.as_deref(), &bytes)
        }
        Command::Repro(a) => {
            let mut config = ExperimentConfig::load(&a.config)?;
            if let Some(out) = a.out {
                config.out = out;
            }
            repro(&config)
        }
    }
}

/// Output files written by [`repro`] inside the output directory.
pub const REPRO_FILES: [&str; 5] = ["corpus.txt", "model.txt", "topics.tsv", "coherence.csv", "intrusion.csv"];

pub fn repro(config: &ExperimentConfig) -> Result<()> {
    let out = &config.out;
    std::fs::create_dir_all(out).map_err(|e| Error::Io {
        path: out.clone(),
        source: e,
    })?;
    let corpus = ingest(&config.corpus, config.stopwords.as_deref(), config.min_count)?;
    write_atomic(&out.join("corpus.txt"), &corpus_bytes(&corpus))?;

    let state = train(&corpus, &config.lda)?;
    save_model(&state, &config.lda, &out.join("model.txt"))?;

    let index = DocFreqIndex::build(&corpus, Tracked::All);
    let ranked = rank(&state, &config.lda, &config.methods, config.top_m, config.deviation)?;
    write_atomic(&out.join("topics.tsv"), &topics_bytes(&ranked, &corpus))?;
    write_atomic(
        &out.join("coherence.csv"),
        &coherence_bytes(&ranked, config.top_m, &index, config.epsilon),
    )?;

    let m = intrusion_list_len(&config.patterns, corpus.vocab_size());
    let ranked = rank(&state, &config.lda, &config.methods, m, config.deviation)?;
    let bytes = intrusion_bytes(&ranked, &config.patterns, config.repeats, &index, config.epsilon, config.lda.seed)?;
    write_atomic(&out.join("intrusion.csv"), &bytes)
}
