//! Text model format.
//!
//! ```text
//! K V D alpha beta seed rng_name iter_done
//! rng_state <word position>
//! K lines of sparse `v:count` topic-word counts
//! D lines of sparse `k:count` document-topic counts
//! D lines of space-separated topic assignments
//! ```
//!
//! Topic totals are rebuilt on load and every count line is checked
//! against a recount of the assignments.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{GibbsState, LdaConfig};
use crate::corpus::{parse_fields, Corpus};
use crate::error::{Error, Result};

pub const RNG_NAME: &str = "chacha8";

pub fn write_model<W: Write>(state: &GibbsState, config: &LdaConfig, mut out: W) -> std::io::Result<()> {
    let (k, v, d) = (state.topics(), state.vocab_size(), state.n_docs());
    writeln!(
        out,
        "{k} {v} {d} {} {} {} {RNG_NAME} {}",
        config.alpha,
        config.beta,
        state.seed(),
        state.sweeps_done()
    )?;
    writeln!(out, "rng_state {}", state.rng_position())?;

    for t in 0..k {
        let pairs = (0..v).map(|w| (w, state.n_kv(t, w)));
        write_sparse(&mut out, pairs)?;
    }
    for doc in 0..d {
        write_sparse(&mut out, state.doc_topic_row(doc).iter().copied().enumerate())?;
    }
    for z in state.assignments() {
        let mut first = true;
        for t in z {
            if !first {
                out.write_all(b" ")?;
            }
            write!(out, "{t}")?;
            first = false;
        }
        out.write_all(b"\n")?;
    }
    out.flush()
}

fn write_sparse<W: Write>(out: &mut W, pairs: impl Iterator<Item = (usize, u32)>) -> std::io::Result<()> {
    let mut first = true;
    for (i, c) in pairs.filter(|&(_, c)| c > 0) {
        if !first {
            out.write_all(b" ")?;
        }
        write!(out, "{i}:{c}")?;
        first = false;
    }
    out.write_all(b"\n")
}

/// Writes to a temporary file next to `path` and renames it into place.
pub fn save_model(state: &GibbsState, config: &LdaConfig, path: &Path) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("model"),
        std::process::id()
    ));
    let write = || -> std::io::Result<()> {
        let file = File::create(&tmp)?;
        write_model(state, config, std::io::BufWriter::new(file))?;
        std::fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

pub fn load_model(path: &Path, corpus: &Corpus) -> Result<(GibbsState, LdaConfig)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_model(BufReader::new(file), corpus)
}

/// Parses a model and checks it against the corpus it was trained on.
/// The returned config has `iterations` set to the sweeps already done.
pub fn read_model<R: BufRead>(input: R, corpus: &Corpus) -> Result<(GibbsState, LdaConfig)> {
    let mut lines = input.lines();
    let mut line_no = 0usize;
    let mut next = |section: &'static str| -> Result<(usize, String)> {
        line_no += 1;
        match lines.next() {
            Some(Ok(line)) => Ok((line_no, line)),
            Some(Err(e)) => Err(Error::parse(line_no, section, e.to_string())),
            None => Err(Error::parse(line_no, section, format!("file ended before the {section} section was complete"))),
        }
    };

    let (n, header) = next("header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [k, v, d, alpha, beta, seed, rng_name, iter_done] = fields[..] else {
        return Err(Error::parse(
            n,
            "header",
            "expected `K V D alpha beta seed rng_name iter_done`",
        ));
    };
    let num = |s: &str, what: &str| -> Result<usize> {
        s.parse().map_err(|_| Error::parse(n, "header", format!("bad {what} {s:?}")))
    };
    let (k, v, d, iter_done) = (num(k, "K")?, num(v, "V")?, num(d, "D")?, num(iter_done, "iter_done")?);
    let float = |s: &str, what: &str| -> Result<f64> {
        s.parse().map_err(|_| Error::parse(n, "header", format!("bad {what} {s:?}")))
    };
    let (alpha, beta) = (float(alpha, "alpha")?, float(beta, "beta")?);
    let seed: u64 = seed
        .parse()
        .map_err(|_| Error::parse(n, "header", format!("bad seed {seed:?}")))?;
    if rng_name != RNG_NAME {
        return Err(Error::parse(
            n,
            "header",
            format!("unsupported rng {rng_name:?}, expected {RNG_NAME}"),
        ));
    }
    if v != corpus.vocab_size() || d != corpus.n_docs() {
        return Err(Error::parse(
            n,
            "header",
            format!(
                "model shape V={v} D={d} does not match corpus V={} D={}",
                corpus.vocab_size(),
                corpus.n_docs()
            ),
        ));
    }

    let (n, rng_line) = next("rng_state")?;
    let rng_pos: u128 = rng_line
        .strip_prefix("rng_state ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::parse(n, "rng_state", "expected `rng_state <position>`"))?;

    let mut word_topic = Vec::with_capacity(k);
    for _ in 0..k {
        let (n, line) = next("topic-word counts")?;
        word_topic.push(parse_sparse(&line, v, n, "topic-word counts")?);
    }
    let mut doc_topic = Vec::with_capacity(d);
    for _ in 0..d {
        let (n, line) = next("document-topic counts")?;
        doc_topic.push(parse_sparse(&line, k, n, "document-topic counts")?);
    }
    let mut assignments = Vec::with_capacity(d);
    let mut assignment_lines = Vec::with_capacity(d);
    for _ in 0..d {
        let (n, line) = next("assignments")?;
        let z: Vec<u32> = parse_fields(&line, n, "assignments")?;
        if let Some(bad) = z.iter().find(|&&t| t as usize >= k) {
            return Err(Error::parse(n, "assignments", format!("topic id {bad} >= K")));
        }
        assignments.push(z);
        assignment_lines.push(n);
    }

    let config = LdaConfig {
        topics: k,
        alpha,
        beta,
        iterations: iter_done.max(1),
        burn_in: 0,
        seed,
    };
    config
        .validate()
        .map_err(|e| Error::parse(1, "header", e.to_string()))?;

    for (doc, (z, &n)) in corpus.docs().iter().zip(assignments.iter().zip(&assignment_lines)) {
        if doc.len() != z.len() {
            return Err(Error::parse(
                n,
                "assignments",
                format!("{} assignments for a document of {} tokens", z.len(), doc.len()),
            ));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(rng_pos);
    let state = GibbsState::from_assignments(corpus, k, assignments, rng, seed, iter_done)?;

    for (t, row) in word_topic.iter().enumerate() {
        if (0..v).any(|w| state.n_kv(t, w) != row[w]) {
            return Err(Error::parse(
                3 + t,
                "topic-word counts",
                format!("counts for topic {t} do not match the assignments"),
            ));
        }
    }
    for (doc, row) in doc_topic.iter().enumerate() {
        if state.doc_topic_row(doc) != &row[..] {
            return Err(Error::parse(
                3 + k + doc,
                "document-topic counts",
                format!("counts for document {doc} do not match the assignments"),
            ));
        }
    }
    Ok((state, config))
}

fn parse_sparse(line: &str, width: usize, n: usize, section: &'static str) -> Result<Vec<u32>> {
    let mut row = vec![0u32; width];
    for pair in line.split_whitespace() {
        let parsed = pair
            .split_once(':')
            .and_then(|(i, c)| Some((i.parse::<usize>().ok()?, c.parse::<u32>().ok()?)));
        match parsed {
            Some((i, c)) if i < width => row[i] = c,
            _ => return Err(Error::parse(n, section, format!("bad entry {pair:?}"))),
        }
    }
    Ok(row)
}
