//! Text ingestion, vocabulary building and the document-frequency index.
//!
//! Input is one document per line. Tokens are lowercased, split on
//! whitespace and stripped of non-alphanumeric characters at both edges.
//! Word ids are assigned in order of first occurrence after filtering, so a
//! given input always produces the same ids.

mod docfreq;

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

pub use docfreq::{DocFreqIndex, Tracked};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vocabulary from an ordered list of distinct words; the
    /// position of each word becomes its id.
    pub fn from_words<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Self::new();
        for word in words {
            let word = word.into();
            if vocab.index.contains_key(&word) {
                return Err(Error::Config(format!("duplicate vocabulary word {word:?}")));
            }
            vocab.insert(word);
        }
        Ok(vocab)
    }

    fn insert(&mut self, word: String) -> u32 {
        if let Some(&id) = self.index.get(&word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.index.insert(word.clone(), id);
        self.words.push(word);
        id
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

/// Lowercase, whitespace split, edge punctuation stripped.
pub fn tokenize(line: &str) -> impl Iterator<Item = String> + '_ {
    line.split_whitespace().filter_map(|raw| {
        let token = raw.trim_matches(|c: char| !c.is_alphanumeric());
        (!token.is_empty()).then(|| token.to_lowercase())
    })
}

/// One stopword per line; blank lines ignored, entries lowercased.
pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut set = HashSet::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let word = line.trim();
        if !word.is_empty() {
            set.insert(word.to_lowercase());
        }
    }
    Ok(set)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestSummary {
    pub n_docs: usize,
    /// Indices of documents left with no tokens after filtering.
    pub empty_docs: Vec<usize>,
    pub n_types_dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    docs: Vec<Vec<u32>>,
    vocab: Vocabulary,
    n_tokens: usize,
}

impl Corpus {
    /// Builds a corpus from documents already expressed as token ids.
    pub fn from_docs(docs: Vec<Vec<u32>>, vocab: Vocabulary) -> Result<Self> {
        let v = vocab.len() as u32;
        if let Some(bad) = docs.iter().flatten().find(|&&w| w >= v) {
            return Err(Error::Config(format!(
                "token id {bad} out of range for vocabulary of size {v}"
            )));
        }
        let n_tokens = docs.iter().map(Vec::len).sum();
        Ok(Self {
            docs,
            vocab,
            n_tokens,
        })
    }

    /// Ingests one document per line from each file in order.
    pub fn ingest<P: AsRef<Path>>(
        paths: &[P],
        stopwords: Option<&HashSet<String>>,
        min_count: u64,
    ) -> Result<(Self, IngestSummary)> {
        let mut lines = Vec::new();
        for path in paths {
            let path = path.as_ref();
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            for line in BufReader::new(file).lines() {
                lines.push(line.map_err(|e| Error::io(path, e))?);
            }
        }
        Self::from_lines(lines.iter().map(String::as_str), stopwords, min_count)
    }

    pub fn from_lines<'a, I>(
        lines: I,
        stopwords: Option<&HashSet<String>>,
        min_count: u64,
    ) -> Result<(Self, IngestSummary)>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut raw_types: HashSet<String> = HashSet::new();
        let tokenized: Vec<Vec<String>> = lines
            .into_iter()
            .map(|line| {
                tokenize(line)
                    .filter(|t| {
                        if !raw_types.contains(t) {
                            raw_types.insert(t.clone());
                        }
                        stopwords.is_none_or(|s| !s.contains(t))
                    })
                    .collect()
            })
            .collect();

        let mut counts: HashMap<&str, u64> = HashMap::new();
        for token in tokenized.iter().flatten() {
            *counts.entry(token.as_str()).or_default() += 1;
        }
        let n_types_seen = raw_types.len();

        let mut vocab = Vocabulary::new();
        let mut docs = Vec::with_capacity(tokenized.len());
        for tokens in &tokenized {
            let doc: Vec<u32> = tokens
                .iter()
                .filter(|t| counts[t.as_str()] >= min_count)
                .map(|t| vocab.insert(t.clone()))
                .collect();
            docs.push(doc);
        }

        if vocab.is_empty() && n_types_seen > 0 {
            return Err(Error::Config(format!(
                "vocabulary is empty after filtering ({n_types_seen} word types removed)"
            )));
        }

        let summary = IngestSummary {
            n_docs: docs.len(),
            empty_docs: docs
                .iter()
                .enumerate()
                .filter(|(_, d)| d.is_empty())
                .map(|(i, _)| i)
                .collect(),
            n_types_dropped: n_types_seen - vocab.len(),
        };
        let corpus = Self::from_docs(docs, vocab)?;
        Ok((corpus, summary))
    }

    pub fn docs(&self) -> &[Vec<u32>] {
        &self.docs
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn n_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn n_tokens(&self) -> usize {
        self.n_tokens
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    /// Total occurrences of each word type (N_v).
    pub fn term_frequencies(&self) -> Vec<u64> {
        let mut freq = vec![0u64; self.vocab.len()];
        for &w in self.docs.iter().flatten() {
            freq[w as usize] += 1;
        }
        freq
    }

    /// Serializes as `V n_docs n_tokens`, then `id word freq` per word,
    /// then one line of space-separated token ids per document.
    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {} {}", self.vocab.len(), self.docs.len(), self.n_tokens)?;
        for (id, (word, freq)) in self
            .vocab
            .words()
            .iter()
            .zip(self.term_frequencies())
            .enumerate()
        {
            writeln!(out, "{id} {word} {freq}")?;
        }
        for doc in &self.docs {
            let mut first = true;
            for w in doc {
                if !first {
                    out.write_all(b" ")?;
                }
                write!(out, "{w}")?;
                first = false;
            }
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |section: &'static str| -> Result<(usize, String)> {
            match lines.next() {
                Some((n, Ok(line))) => Ok((n, line)),
                Some((n, Err(e))) => Err(Error::parse(n, section, e.to_string())),
                None => Err(Error::parse(0, section, "unexpected end of file")),
            }
        };

        let (n, header) = next("header")?;
        let fields = parse_fields::<usize>(&header, n, "header")?;
        let [v, n_docs, n_tokens] = fields[..] else {
            return Err(Error::parse(n, "header", "expected `V n_docs n_tokens`"));
        };

        let mut words = Vec::with_capacity(v);
        let mut freqs = Vec::with_capacity(v);
        for expected in 0..v {
            let (n, line) = next("vocabulary")?;
            let mut parts = line.split(' ');
            let (Some(id), Some(word), Some(freq), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(Error::parse(n, "vocabulary", "expected `id word freq`"));
            };
            if id.parse::<usize>().ok() != Some(expected) {
                return Err(Error::parse(n, "vocabulary", format!("expected id {expected}")));
            }
            let freq: u64 = freq
                .parse()
                .map_err(|_| Error::parse(n, "vocabulary", format!("bad frequency {freq:?}")))?;
            words.push(word.to_string());
            freqs.push(freq);
        }
        let vocab = Vocabulary::from_words(words)?;

        let mut docs = Vec::with_capacity(n_docs);
        for _ in 0..n_docs {
            let (n, line) = next("documents")?;
            let doc = parse_fields::<u32>(&line, n, "documents")?;
            if let Some(bad) = doc.iter().find(|&&w| w as usize >= v) {
                return Err(Error::parse(n, "documents", format!("token id {bad} >= V")));
            }
            docs.push(doc);
        }

        let corpus = Self::from_docs(docs, vocab)?;
        if corpus.n_tokens != n_tokens {
            return Err(Error::parse(
                1,
                "header",
                format!("header says {n_tokens} tokens, documents hold {}", corpus.n_tokens),
            ));
        }
        if corpus.term_frequencies() != freqs {
            return Err(Error::parse(1, "vocabulary", "word frequencies do not match documents"));
        }
        Ok(corpus)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(BufReader::new(file))
    }
}

pub(crate) fn parse_fields<T: std::str::FromStr>(
    line: &str,
    line_no: usize,
    section: &'static str,
) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|f| {
            f.parse()
                .map_err(|_| Error::parse(line_no, section, format!("bad field {f:?}")))
        })
        .collect()
}
