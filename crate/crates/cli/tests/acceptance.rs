//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Criteria 5 and 6 need the 20 Newsgroups corpus: set `TOPICRANK_20NG` to
//! either a text file with one document per line or a directory tree with
//! one message per file (e.g. the `20news-bydate` distribution).

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topicrank::eval::{coherence_of_words, run_intrusion_benchmark, BenchmarkReport, IntruderPattern};
use topicrank::lda::{read_model, run_sweeps, write_model};
use topicrank::rerank::{chi_square_cell, score, top_m, DeviationReading};
use topicrank::synthetic::{planted, PlantedCorpus, PlantedSpec};
use topicrank::{
    estimate_phi, Corpus, DocFreqIndex, GibbsState, LdaConfig, Method, RankedTopic, TopicWordMatrix, Tracked,
};
use topicrank_cli::{repro, ExperimentConfig, REPRO_FILES};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_secs: f64) -> bool {
    elapsed.as_secs_f64() < limit_secs
}

// 1 ------------------------------------------------------------------------

fn conservation() -> Outcome {
    let start = Instant::now();
    let p = planted(&PlantedSpec {
        topics: 5,
        docs: 200,
        doc_len: 50,
        stopwords: 3,
        seed: 1,
        ..Default::default()
    });
    let cfg = LdaConfig {
        iterations: 50,
        seed: 1,
        ..LdaConfig::new(5)
    };
    let mut state = match GibbsState::init(&p.corpus, &cfg) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    for sweep in 1..=50 {
        if let Err(e) = state.sweep(&p.corpus, &cfg).and_then(|_| state.verify(&p.corpus)) {
            return outcome(false, format!("sweep {sweep}: {e}"));
        }
        let total: u64 = (0..5).map(|k| state.n_k(k) as u64).sum();
        let rows_ok = (0..5).all(|k| {
            (0..p.corpus.vocab_size()).map(|v| state.n_kv(k, v) as u64).sum::<u64>() == state.n_k(k) as u64
        });
        let docs_ok = p
            .corpus
            .docs()
            .iter()
            .enumerate()
            .all(|(d, doc)| state.doc_topic_row(d).iter().map(|&c| c as usize).sum::<usize>() == doc.len());
        if total as usize != p.corpus.n_tokens() || !rows_ok || !docs_ok {
            return outcome(false, format!("count invariant broken after sweep {sweep}"));
        }
    }
    let t = start.elapsed();
    outcome(within(t, 10.0), format!("50 sweeps verified exactly, {:.2}s (limit 10s)", t.as_secs_f64()))
}

// 2 ------------------------------------------------------------------------

fn four_cell(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let n = a + b + c + d;
    let cells = [(a, a + b, a + c), (b, a + b, b + d), (c, c + d, a + c), (d, c + d, b + d)];
    cells
        .iter()
        .map(|&(o, row, col)| {
            let e = row * col / n;
            (o - e).powi(2) / e
        })
        .sum()
}

fn chi_square_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let [a, b, c, d]: [u64; 4] = std::array::from_fn(|_| rng.random_range(1..2000));
        let closed = match chi_square_cell(a, a + b, a + c, a + b + c + d) {
            Ok(x) => x,
            Err(e) => return outcome(false, e.to_string()),
        };
        worst = worst.max((closed - four_cell(a as f64, b as f64, c as f64, d as f64)).abs());
    }
    let example = chi_square_cell(30, 40, 40, 100).unwrap_or(f64::NAN);
    let t = start.elapsed();
    outcome(
        worst <= 1e-9 && (example - 34.028).abs() < 5e-4 && within(t, 1.0),
        format!(
            "max |closed - oracle| = {worst:.2e} over 1000 tables (tol 1e-9); (30,10,10,50) -> {example:.4}; {:.3}s (limit 1s)",
            t.as_secs_f64()
        ),
    )
}

// 3 and 4 ------------------------------------------------------------------

const PLANTED_SEEDS: [u64; 3] = [0, 1, 2];

fn stopword_corpus(seed: u64) -> PlantedCorpus {
    planted(&PlantedSpec {
        topics: 10,
        words_per_topic: 50,
        docs: 5000,
        doc_len: 20,
        stopwords: 5,
        stopword_multiplier: 5.0,
        seed,
        ..Default::default()
    })
}

fn stopword_config(seed: u64) -> LdaConfig {
    LdaConfig {
        alpha: 0.1,
        beta: 0.01,
        iterations: 300,
        seed,
        ..LdaConfig::new(10)
    }
}

struct PlantedRun {
    corpus: PlantedCorpus,
    phi: TopicWordMatrix,
}

fn train_planted(seed: u64) -> topicrank::Result<PlantedRun> {
    let corpus = stopword_corpus(seed);
    let cfg = stopword_config(seed);
    let mut state = GibbsState::init(&corpus.corpus, &cfg)?;
    run_sweeps(&mut state, &corpus.corpus, &cfg, cfg.iterations, false)?;
    let phi = estimate_phi(&state, &cfg);
    Ok(PlantedRun { corpus, phi })
}

fn stopword_filtering(runs: &[PlantedRun], elapsed: Duration) -> Outcome {
    let mut detail = String::new();
    let mut pass = within(elapsed, 120.0);
    for method in Method::ALL {
        let mut per_seed: Vec<Vec<usize>> = Vec::new();
        for run in runs {
            let ranked = match score(method, &run.phi, DeviationReading::PerTerm).and_then(|s| top_m(&s, 10)) {
                Ok(r) => r,
                Err(e) => return outcome(false, format!("{method}: {e}")),
            };
            per_seed.push(
                ranked
                    .iter()
                    .map(|t| t.word_ids().filter(|&w| run.corpus.is_stopword(w)).count())
                    .collect(),
            );
        }
        let worst: Vec<usize> = per_seed
            .iter()
            .map(|c| if method == Method::Norm { *c.iter().min().unwrap() } else { *c.iter().max().unwrap() })
            .collect();
        let mean_min = per_seed.iter().map(|c| *c.iter().min().unwrap() as f64).sum::<f64>() / runs.len() as f64;
        let mean_max = per_seed.iter().map(|c| *c.iter().max().unwrap() as f64).sum::<f64>() / runs.len() as f64;
        let ok = if method == Method::Norm {
            per_seed.iter().all(|c| c.iter().all(|&n| n >= 3))
        } else {
            per_seed.iter().all(|c| c.iter().all(|&n| n == 0))
        };
        pass &= ok;
        if method == Method::Norm {
            detail += &format!("{method}: fewest stopwords in a top-10 per seed {worst:?} (mean {mean_min:.2}, need >= 3); ");
        } else {
            detail += &format!("{method}: most stopwords in a top-10 per seed {worst:?} (mean {mean_max:.2}, need 0); ");
        }
    }
    detail += &format!("{:.1}s (limit 120s)", elapsed.as_secs_f64());
    outcome(pass, detail)
}

fn coherence_conflict(run: &PlantedRun) -> Outcome {
    let start = Instant::now();
    let index = DocFreqIndex::build(&run.corpus.corpus, Tracked::All);
    let ranked = match top_m(&run.phi, 30) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut swaps = 0;
    let mut worst_gain = f64::INFINITY;
    for topic in &ranked {
        let words: Vec<u32> = topic.word_ids().filter(|&w| !run.corpus.is_stopword(w)).take(10).collect();
        let before = match coherence_of_words(topic.topic_id, &words, &index, 1.0) {
            Ok(c) => c,
            Err(e) => return outcome(false, e.to_string()),
        };
        for &s in &run.corpus.stopword_ids {
            let mut swapped = words.clone();
            swapped[9] = s;
            let after = coherence_of_words(topic.topic_id, &swapped, &index, 1.0).unwrap_or(f64::NEG_INFINITY);
            worst_gain = worst_gain.min(after - before);
            swaps += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        worst_gain >= 0.0 && within(t, 5.0),
        format!(
            "{swaps} swaps over 10 topics, smallest coherence change {worst_gain:+.4} (need >= 0); {:.2}s (limit 5s)",
            t.as_secs_f64()
        ),
    )
}

// 5 and 6 ------------------------------------------------------------------

fn newsgroups_documents(path: &Path) -> std::io::Result<Vec<String>> {
    if path.is_file() {
        let bytes = std::fs::read(path)?;
        return Ok(String::from_utf8_lossy(&bytes).lines().map(str::to_string).collect());
    }
    let mut files = Vec::new();
    let mut stack = vec![path.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir)? {
            let p = entry?.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.push(p);
            }
        }
    }
    files.sort();
    let mut docs = Vec::with_capacity(files.len());
    for f in files {
        let bytes = std::fs::read(&f)?;
        let text = String::from_utf8_lossy(&bytes);
        // drop the mail header block
        let body = text.split_once("\n\n").map_or(text.as_ref(), |(_, b)| b);
        docs.push(body.split_whitespace().collect::<Vec<_>>().join(" "));
    }
    Ok(docs)
}

struct NewsgroupsRun {
    voc: BenchmarkReport,
    topic: BenchmarkReport,
    selfp: BenchmarkReport,
    elapsed: Duration,
}

fn newsgroups() -> Result<NewsgroupsRun, String> {
    let Some(root) = std::env::var_os("TOPICRANK_20NG").map(PathBuf::from) else {
        return Err("20 Newsgroups corpus unavailable (set TOPICRANK_20NG)".into());
    };
    let start = Instant::now();
    let docs = newsgroups_documents(&root).map_err(|e| format!("{}: {e}", root.display()))?;
    let stop_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/english_stopwords.txt");
    let stop = topicrank::corpus::load_stopwords(&stop_path).map_err(|e| e.to_string())?;
    let (corpus, _) = Corpus::from_lines(docs.iter().map(String::as_str), Some(&stop), 5).map_err(|e| e.to_string())?;
    let cfg = LdaConfig {
        iterations: 500,
        ..LdaConfig::new(50)
    };
    let mut state = GibbsState::init(&corpus, &cfg).map_err(|e| e.to_string())?;
    run_sweeps(&mut state, &corpus, &cfg, cfg.iterations, false).map_err(|e| e.to_string())?;
    let phi = estimate_phi(&state, &cfg);
    let ranked: Vec<(Method, Vec<RankedTopic>)> = Method::ALL
        .into_iter()
        .map(|m| Ok((m, top_m(&score(m, &phi, DeviationReading::PerTerm)?, 100)?)))
        .collect::<topicrank::Result<_>>()
        .map_err(|e| e.to_string())?;
    let index = DocFreqIndex::build(&corpus, Tracked::All);
    let bench = |p| run_intrusion_benchmark(&ranked, p, 10, &index, 1.0, 0).map_err(|e| e.to_string());
    Ok(NewsgroupsRun {
        voc: bench(IntruderPattern::Vocabulary)?,
        topic: bench(IntruderPattern::OtherTopics)?,
        selfp: bench(IntruderPattern::SameTopic)?,
        elapsed: start.elapsed(),
    })
}

fn mean_of(report: &BenchmarkReport, method: Method) -> f64 {
    report.methods.iter().find(|m| m.method == method).map_or(f64::NAN, |m| m.mean)
}

fn directional_intrusion(run: &Result<NewsgroupsRun, String>) -> Outcome {
    let run = match run {
        Ok(r) => r,
        Err(e) => return outcome(false, e.clone()),
    };
    let rerankers = [Method::Sdw, Method::Sdwts, Method::Chi];
    let norm_t = mean_of(&run.topic, Method::Norm);
    let norm_v = mean_of(&run.voc, Method::Norm);
    let topic_ok = rerankers.iter().all(|&m| mean_of(&run.topic, m) >= norm_t + 0.03);
    let voc_ok = rerankers.iter().all(|&m| mean_of(&run.voc, m) >= norm_v);
    let fmt = |r: &BenchmarkReport| {
        Method::ALL
            .iter()
            .map(|&m| format!("{m}={:.3}", mean_of(r, m)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    outcome(
        topic_ok && voc_ok && within(run.elapsed, 1800.0),
        format!(
            "s_topic [{}] (need reranked >= norm + 0.03); s_voc [{}] (need reranked >= norm); {:.0}s (target 1800s)",
            fmt(&run.topic),
            fmt(&run.voc),
            run.elapsed.as_secs_f64()
        ),
    )
}

fn self_buckets(run: &Result<NewsgroupsRun, String>) -> Outcome {
    let run = match run {
        Ok(r) => r,
        Err(e) => return outcome(false, e.clone()),
    };
    let bucket_mean = |m: Method| {
        run.selfp
            .methods
            .iter()
            .find(|a| a.method == m)
            .and_then(|a| a.bucket_mean())
            .unwrap_or(f64::NAN)
    };
    let norm = bucket_mean(Method::Norm);
    let pass = [Method::Sdw, Method::Sdwts, Method::Chi].iter().all(|&m| bucket_mean(m) >= norm);
    let last: Vec<String> = run
        .selfp
        .methods
        .iter()
        .map(|a| {
            let b = a.buckets.last().and_then(|b| b.accuracy()).unwrap_or(f64::NAN);
            format!("{}={:.3}", a.method, b)
        })
        .collect();
    outcome(
        pass,
        format!(
            "bucket means {} (need reranked >= norm); ranks 91-100: {}",
            Method::ALL
                .iter()
                .map(|&m| format!("{m}={:.3}", bucket_mean(m)))
                .collect::<Vec<_>>()
                .join(" "),
            last.join(" ")
        ),
    )
}

// 7 ------------------------------------------------------------------------

fn determinism() -> Outcome {
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return outcome(false, e.to_string()),
    };
    let conf = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/fixture.conf");
    let mut identical = true;
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let mut config = match ExperimentConfig::load(&conf) {
            Ok(c) => c,
            Err(e) => return outcome(false, e.to_string()),
        };
        config.out = dir.path().join(run);
        if let Err(e) = repro(&config) {
            return outcome(false, format!("repro: {e}"));
        }
        outputs.push(config.out);
    }
    for f in REPRO_FILES {
        let a = std::fs::read(outputs[0].join(f)).ok();
        identical &= a.is_some() && a == std::fs::read(outputs[1].join(f)).ok();
    }

    let p = planted(&PlantedSpec {
        topics: 4,
        docs: 100,
        doc_len: 30,
        stopwords: 2,
        ..Default::default()
    });
    let cfg = LdaConfig {
        iterations: 40,
        seed: 9,
        ..LdaConfig::new(4)
    };
    let resumed_ok = (|| -> topicrank::Result<bool> {
        let mut full = GibbsState::init(&p.corpus, &cfg)?;
        run_sweeps(&mut full, &p.corpus, &cfg, 40, false)?;
        let mut part = GibbsState::init(&p.corpus, &cfg)?;
        run_sweeps(&mut part, &p.corpus, &cfg, 25, false)?;
        let mut buf = Vec::new();
        write_model(&part, &cfg, &mut buf).map_err(|e| topicrank::Error::InternalState(e.to_string()))?;
        let (mut resumed, loaded) = read_model(buf.as_slice(), &p.corpus)?;
        run_sweeps(&mut resumed, &p.corpus, &loaded, 15, false)?;
        Ok(resumed.assignments() == full.assignments()
            && estimate_phi(&resumed, &cfg).scores() == estimate_phi(&full, &cfg).scores())
    })();
    match resumed_ok {
        Ok(resumed) => outcome(
            identical && resumed,
            format!("repro byte-identical: {identical}; save/load/resume (25+15) equals 40 sweeps: {resumed}"),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

// 8 ------------------------------------------------------------------------

fn throughput() -> Outcome {
    let p = planted(&PlantedSpec {
        topics: 10,
        words_per_topic: 50,
        docs: 1000,
        doc_len: 100,
        topics_per_doc: 2,
        seed: 8,
        ..Default::default()
    });
    let cfg = LdaConfig {
        iterations: 20,
        ..LdaConfig::new(10)
    };
    let mut state = match GibbsState::init(&p.corpus, &cfg) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let start = Instant::now();
    for _ in 0..cfg.iterations {
        if let Err(e) = state.sweep(&p.corpus, &cfg) {
            return outcome(false, e.to_string());
        }
    }
    let rate = (p.corpus.n_tokens() * cfg.iterations) as f64 / start.elapsed().as_secs_f64();
    outcome(
        rate >= 1e6,
        format!(
            "{:.2}M resamples/s single-threaded at K=10, V={} (floor 1M/s)",
            rate / 1e6,
            p.corpus.vocab_size()
        ),
    )
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |n: u32, name: &'static str, o: Outcome| {
        println!("{} criterion {n} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, name, o));
    };

    report(1, "count conservation", conservation());
    report(2, "chi-square oracle", chi_square_oracle());

    let start = Instant::now();
    let runs: topicrank::Result<Vec<PlantedRun>> = std::thread::scope(|s| {
        let handles: Vec<_> = PLANTED_SEEDS.iter().map(|&seed| s.spawn(move || train_planted(seed))).collect();
        handles.into_iter().map(|h| h.join().expect("training thread")).collect()
    });
    let elapsed = start.elapsed();
    match &runs {
        Ok(runs) => {
            report(3, "stopword filtering", stopword_filtering(runs, elapsed));
            report(4, "coherence conflict", coherence_conflict(&runs[0]));
        }
        Err(e) => {
            report(3, "stopword filtering", outcome(false, e.to_string()));
            report(4, "coherence conflict", outcome(false, e.to_string()));
        }
    }

    let news = newsgroups();
    report(5, "directional intrusion", directional_intrusion(&news));
    report(6, "s_self buckets", self_buckets(&news));
    report(7, "determinism and resume", determinism());
    report(8, "sampler throughput", throughput());

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {} passed, {} failed",
        results.len() - failed.len(),
        failed.len()
    );
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
