use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Which words get co-document statistics.
#[derive(Debug, Clone, Copy)]
pub enum Tracked<'a> {
    All,
    Words(&'a [u32]),
}

/// Document frequencies D(v) for every word and co-document frequencies
/// D(v1, v2) for tracked words.
///
/// Co-document counts are not materialized as a pair table. Each tracked
/// word keeps its sorted posting list and D(v1, v2) is the size of the
/// intersection, computed on request.
#[derive(Debug, Clone)]
pub struct DocFreqIndex {
    n_docs: usize,
    df: Vec<u32>,
    term_freq: Vec<u64>,
    postings: Vec<Option<Vec<u32>>>,
}

impl DocFreqIndex {
    pub fn build(corpus: &Corpus, tracked: Tracked<'_>) -> Self {
        let v = corpus.vocab_size();
        let mut is_tracked = vec![matches!(tracked, Tracked::All); v];
        if let Tracked::Words(words) = tracked {
            for &w in words {
                assert!((w as usize) < v, "tracked word {w} outside vocabulary");
                is_tracked[w as usize] = true;
            }
        }

        let mut df = vec![0u32; v];
        let mut term_freq = vec![0u64; v];
        let mut postings: Vec<Option<Vec<u32>>> = is_tracked
            .iter()
            .map(|&t| t.then(Vec::new))
            .collect();
        let mut last_doc = vec![u32::MAX; v];

        for (d, doc) in corpus.docs().iter().enumerate() {
            let d = d as u32;
            for &w in doc {
                let w = w as usize;
                term_freq[w] += 1;
                if last_doc[w] == d {
                    continue;
                }
                last_doc[w] = d;
                df[w] += 1;
                if let Some(list) = &mut postings[w] {
                    list.push(d);
                }
            }
        }

        Self {
            n_docs: corpus.n_docs(),
            df,
            term_freq,
            postings,
        }
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn vocab_size(&self) -> usize {
        self.df.len()
    }

    /// D(v); zero for words never seen.
    pub fn df(&self, word: u32) -> u32 {
        self.df.get(word as usize).copied().unwrap_or(0)
    }

    /// Corpus frequency N_v.
    pub fn term_freq(&self, word: u32) -> u64 {
        self.term_freq.get(word as usize).copied().unwrap_or(0)
    }

    pub fn is_tracked(&self, word: u32) -> bool {
        matches!(self.postings.get(word as usize), Some(Some(_)))
    }

    /// D(v1, v2). Both words must be tracked.
    pub fn codf(&self, a: u32, b: u32) -> Result<u32> {
        let (Some(Some(pa)), Some(Some(pb))) =
            (self.postings.get(a as usize), self.postings.get(b as usize))
        else {
            return Err(Error::UntrackedPair(a, b));
        };
        Ok(intersection_size(pa, pb))
    }
}

fn intersection_size(a: &[u32], b: &[u32]) -> u32 {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Vocabulary;

    fn corpus(docs: Vec<Vec<u32>>, v: usize) -> Corpus {
        let vocab = Vocabulary::from_words((0..v).map(|i| format!("w{i}"))).unwrap();
        Corpus::from_docs(docs, vocab).unwrap()
    }

    #[test]
    fn counts_documents_not_tokens() {
        // a=0, b=1
        let c = corpus(vec![vec![0, 1], vec![0], vec![1, 0]], 3);
        let idx = DocFreqIndex::build(&c, Tracked::All);
        assert_eq!(idx.df(0), 3);
        assert_eq!(idx.df(1), 2);
        assert_eq!(idx.codf(0, 1).unwrap(), 2);
        assert_eq!(idx.codf(1, 0).unwrap(), 2);
        assert_eq!(idx.df(2), 0);
        assert_eq!(idx.n_docs(), 3);
    }

    #[test]
    fn duplicates_within_a_document_count_once() {
        let c = corpus(vec![vec![0, 0, 1]], 2);
        let idx = DocFreqIndex::build(&c, Tracked::All);
        assert_eq!(idx.df(0), 1);
        assert_eq!(idx.term_freq(0), 2);
        assert_eq!(idx.codf(0, 1).unwrap(), 1);
    }

    #[test]
    fn untracked_pairs_are_reported() {
        let c = corpus(vec![vec![0, 1, 2]], 3);
        let idx = DocFreqIndex::build(&c, Tracked::Words(&[0, 1]));
        assert_eq!(idx.codf(0, 1).unwrap(), 1);
        assert!(matches!(idx.codf(0, 2), Err(Error::UntrackedPair(0, 2))));
        assert_eq!(idx.df(2), 1);
    }
}
