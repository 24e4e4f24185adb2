//! Planted-topic corpora: disjoint per-topic vocabularies, optionally with
//! "stopwords" injected into every document, so the right answer is known
//! by construction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Vocabulary};

#[derive(Debug, Clone)]
pub struct PlantedSpec {
    pub topics: usize,
    pub words_per_topic: usize,
    pub docs: usize,
    /// Topical tokens per document.
    pub doc_len: usize,
    /// Topics mixed into each document (1 = single-topic documents).
    pub topics_per_doc: usize,
    pub stopwords: usize,
    /// Occurrences of each stopword per document, relative to the expected
    /// per-document count of a topical word.
    pub stopword_multiplier: f64,
    pub seed: u64,
}

impl Default for PlantedSpec {
    fn default() -> Self {
        Self {
            topics: 10,
            words_per_topic: 50,
            docs: 500,
            doc_len: 100,
            topics_per_doc: 1,
            stopwords: 0,
            stopword_multiplier: 5.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedCorpus {
    pub corpus: Corpus,
    /// Word ids of each planted topic.
    pub topic_words: Vec<Vec<u32>>,
    pub stopword_ids: Vec<u32>,
    /// Topics used by each document, primary first.
    pub doc_topics: Vec<Vec<usize>>,
}

impl PlantedCorpus {
    /// Planted topic owning `word`, if it is topical.
    pub fn topic_of(&self, word: u32) -> Option<usize> {
        self.topic_words.iter().position(|ws| ws.contains(&word))
    }

    pub fn is_stopword(&self, word: u32) -> bool {
        self.stopword_ids.contains(&word)
    }
}

/// Topic `t` owns words `t{t}_w{i}`; stopwords are `stop{j}`. Documents
/// are assigned primary topics round-robin; topical tokens are spread
/// evenly over the document's topics and drawn uniformly within each.
pub fn planted(spec: &PlantedSpec) -> PlantedCorpus {
    assert!(spec.topics >= 1 && spec.words_per_topic >= 1);
    assert!((1..=spec.topics).contains(&spec.topics_per_doc));
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut words = Vec::new();
    let mut topic_words = Vec::with_capacity(spec.topics);
    for t in 0..spec.topics {
        let start = words.len() as u32;
        words.extend((0..spec.words_per_topic).map(|i| format!("t{t}_w{i}")));
        topic_words.push((start..words.len() as u32).collect::<Vec<u32>>());
    }
    let stop_start = words.len() as u32;
    words.extend((0..spec.stopwords).map(|j| format!("stop{j}")));
    let stopword_ids: Vec<u32> = (stop_start..words.len() as u32).collect();
    let vocab = Vocabulary::from_words(words).expect("generated words are distinct");

    let per_word = spec.doc_len as f64 / (spec.words_per_topic * spec.topics_per_doc) as f64;
    let stop_count = (spec.stopword_multiplier * per_word).round() as usize;

    let mut docs = Vec::with_capacity(spec.docs);
    let mut doc_topics = Vec::with_capacity(spec.docs);
    for d in 0..spec.docs {
        let mut doc = Vec::with_capacity(spec.doc_len + stop_count * spec.stopwords);
        let mut mix = vec![d % spec.topics];
        while mix.len() < spec.topics_per_doc {
            let t = rng.random_range(0..spec.topics);
            if !mix.contains(&t) {
                mix.push(t);
            }
        }
        for n in 0..spec.doc_len {
            let t = mix[n % mix.len()];
            let ws = &topic_words[t];
            doc.push(ws[rng.random_range(0..ws.len())]);
        }
        for &s in &stopword_ids {
            doc.extend(std::iter::repeat_n(s, stop_count.max(1)));
        }
        doc.shuffle(&mut rng);
        docs.push(doc);
        doc_topics.push(mix);
    }

    PlantedCorpus {
        corpus: Corpus::from_docs(docs, vocab).expect("ids in range"),
        topic_words,
        stopword_ids,
        doc_topics,
    }
}
