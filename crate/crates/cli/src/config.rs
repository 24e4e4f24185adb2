//! Experiment config: flat `key = value` lines, `#` starts a comment.
//!
//! ```text
//! corpus = docs.txt, more.txt
//! stopwords = stop.txt
//! topics = 20
//! iters = 200
//! methods = norm,sdw,sdwts,chi
//! pattern = s_voc,s_topic
//! out = results
//! ```
//!
//! Relative paths are resolved against the config file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use topicrank::eval::{IntruderPattern, DEFAULT_EPSILON};
use topicrank::rerank::DeviationReading;
use topicrank::{Error, LdaConfig, Method, Result};

const SECTION: &str = "experiment config";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub corpus: Vec<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub min_count: u64,
    pub lda: LdaConfig,
    pub top_m: usize,
    pub methods: Vec<Method>,
    pub patterns: Vec<IntruderPattern>,
    pub repeats: usize,
    pub epsilon: f64,
    pub deviation: DeviationReading,
    pub out: PathBuf,
}

pub fn parse_list<T>(value: &str) -> Result<Vec<T>>
where
    T: std::str::FromStr<Err = Error> + PartialEq,
{
    let mut items = Vec::new();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let item: T = part.parse()?;
        if !items.contains(&item) {
            items.push(item);
        }
    }
    if items.is_empty() {
        return Err(Error::Argument(format!("empty list {value:?}")));
    }
    Ok(items)
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: n,
                    section: SECTION,
                    message: "expected key = value".into(),
                });
            };
            let key = key.trim().to_ascii_lowercase().replace('-', "_");
            if entries.insert(key.clone(), (n, value.trim().to_string())).is_some() {
                return Err(Error::Parse {
                    line: n,
                    section: SECTION,
                    message: format!("duplicate key {key}"),
                });
            }
        }

        let resolve = |p: &str| {
            let p = Path::new(p);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        let mut take = |key: &str| entries.remove(key).map(|(_, v)| v);

        let corpus: Vec<PathBuf> = take("corpus")
            .ok_or_else(|| Error::Config("missing required key corpus".into()))?
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(resolve)
            .collect();
        if corpus.is_empty() {
            return Err(Error::Config("corpus lists no files".into()));
        }
        let topics: usize = number(
            "topics",
            &take("topics").ok_or_else(|| Error::Config("missing required key topics".into()))?,
        )?;
        let mut lda = LdaConfig::new(topics);
        if let Some(v) = take("alpha") {
            lda.alpha = number("alpha", &v)?;
        }
        if let Some(v) = take("beta") {
            lda.beta = number("beta", &v)?;
        }
        if let Some(v) = take("iters") {
            lda.iterations = number("iters", &v)?;
        }
        if let Some(v) = take("seed") {
            lda.seed = number("seed", &v)?;
        }
        lda.validate()?;

        let config = Self {
            corpus,
            stopwords: take("stopwords").map(|p| resolve(&p)),
            min_count: take("min_count").map(|v| number("min_count", &v)).transpose()?.unwrap_or(1),
            lda,
            top_m: take("top_m").map(|v| number("top_m", &v)).transpose()?.unwrap_or(20),
            methods: take("methods").map(|v| parse_list(&v)).transpose()?.unwrap_or(Method::ALL.to_vec()),
            patterns: take("pattern")
                .map(|v| parse_list(&v))
                .transpose()?
                .unwrap_or(vec![IntruderPattern::Vocabulary]),
            repeats: take("repeats").map(|v| number("repeats", &v)).transpose()?.unwrap_or(10),
            epsilon: take("epsilon")
                .map(|v| number("epsilon", &v))
                .transpose()?
                .unwrap_or(DEFAULT_EPSILON),
            deviation: take("deviation").map(|v| v.parse()).transpose()?.unwrap_or_default(),
            out: resolve(&take("out").unwrap_or_else(|| "out".into())),
        };
        if let Some((key, (line, _))) = entries.into_iter().next() {
            return Err(Error::Parse {
                line,
                section: SECTION,
                message: format!("unknown key {key}"),
            });
        }
        if config.top_m == 0 {
            return Err(Error::Config("top_m must be >= 1".into()));
        }
        if config.repeats == 0 {
            return Err(Error::Config("repeats must be >= 1".into()));
        }
        if config.epsilon.is_nan() || config.epsilon <= 0.0 {
            return Err(Error::Config(format!("epsilon must be > 0, got {}", config.epsilon)));
        }
        Ok(config)
    }
}
