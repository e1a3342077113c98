//! Text similarity over bags of words: exact cosine as the baseline and a
//! soft cosine over a word-vector relation matrix so related-but-different
//! tokens still contribute. Both are bounded in [0,1].

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{CcdpError, Result};

const STOPWORDS_EN: &str = include_str!("stopwords/en.txt");
const STOPWORDS_FR: &str = include_str!("stopwords/fr.txt");

/// Weighted multiset of normalized tokens. BTreeMap keeps iteration
/// deterministic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TokenBag {
    weights: BTreeMap<String, f64>,
}

impl TokenBag {
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, token: &str) -> f64 {
        self.weights.get(token).copied().unwrap_or(0.0)
    }

    pub fn tokens(&self) -> impl Iterator<Item = (&str, f64)> {
        self.weights.iter().map(|(t, &w)| (t.as_str(), w))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for TokenBag {
    fn from_iter<I: IntoIterator<Item = (S, f64)>>(iter: I) -> Self {
        let mut weights = BTreeMap::new();
        for (t, w) in iter {
            if w > 0.0 {
                weights.insert(t.into(), w);
            }
        }
        TokenBag { weights }
    }
}

/// Tokenizer configuration: stopwords plus the minimum kept token length.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    stopwords: std::collections::BTreeSet<String>,
}

impl Default for Tokenizer {
    fn default() -> Self {
        let stopwords = STOPWORDS_EN
            .lines()
            .chain(STOPWORDS_FR.lines())
            .map(|l| l.trim().to_string())
            .filter(|l| !l.is_empty())
            .collect();
        Tokenizer { stopwords }
    }
}

impl Tokenizer {
    pub fn with_stopwords<I: IntoIterator<Item = String>>(words: I) -> Tokenizer {
        Tokenizer {
            stopwords: words.into_iter().collect(),
        }
    }

    /// Unicode-lowercase, split on non-alphanumeric runs, drop single-char
    /// tokens and stopwords; weight is the term frequency.
    pub fn tokenize(&self, text: &str) -> TokenBag {
        let mut weights: BTreeMap<String, f64> = BTreeMap::new();
        for raw in text.split(|c: char| !c.is_alphanumeric()) {
            if raw.chars().count() <= 1 {
                continue;
            }
            let token = raw.to_lowercase();
            if self.stopwords.contains(&token) {
                continue;
            }
            *weights.entry(token).or_insert(0.0) += 1.0;
        }
        TokenBag { weights }
    }
}

/// Inverse document frequencies for optional re-weighting of term-frequency
/// bags. Off by default: subjects are short and IDF over tiny corpora is
/// noisy, but the knob exists in the config.
#[derive(Debug, Clone, Default)]
pub struct IdfWeights {
    doc_count: usize,
    doc_freq: BTreeMap<String, usize>,
}

impl IdfWeights {
    /// Build document frequencies from an iterator of documents (each already
    /// a token bag).
    pub fn from_documents<'a, I: IntoIterator<Item = &'a TokenBag>>(docs: I) -> IdfWeights {
        let mut doc_count = 0;
        let mut doc_freq: BTreeMap<String, usize> = BTreeMap::new();
        for bag in docs {
            doc_count += 1;
            for (t, _) in bag.tokens() {
                *doc_freq.entry(t.to_string()).or_insert(0) += 1;
            }
        }
        IdfWeights { doc_count, doc_freq }
    }

    pub fn idf(&self, token: &str) -> f64 {
        let df = self.doc_freq.get(token).copied().unwrap_or(0) as f64;
        ((self.doc_count as f64 + 1.0) / (df + 1.0)).ln() + 1.0
    }

    /// Rescale a TF bag by per-token IDF.
    pub fn apply(&self, bag: &TokenBag) -> TokenBag {
        bag.tokens().map(|(t, w)| (t, w * self.idf(t))).collect()
    }
}

/// The similarity contract the proximity module consumes: symmetric, 1 on
/// identical non-empty bags, 0 when either bag is empty, always in [0,1].
pub trait SimilarityProvider: Send + Sync {
    fn similarity(&self, a: &TokenBag, b: &TokenBag) -> f64;
}

/// Exact-token cosine: only identical words match.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactCosine;

impl SimilarityProvider for ExactCosine {
    fn similarity(&self, a: &TokenBag, b: &TokenBag) -> f64 {
        cosine_similarity(a, b)
    }
}

pub fn cosine_similarity(a: &TokenBag, b: &TokenBag) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    if a == b {
        return 1.0;
    }
    let mut dot = 0.0;
    for (t, w) in a.tokens() {
        dot += w * b.weight(t);
    }
    let na: f64 = a.tokens().map(|(_, w)| w * w).sum::<f64>().sqrt();
    let nb: f64 = b.tokens().map(|(_, w)| w * w).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(0.0, 1.0)
}

/// Word vectors and the derived pairwise token relation
/// `max(0, cos(v1, v2))^2`, clamped so every entry stays in [0,1].
/// Out-of-vocabulary tokens relate only to themselves.
#[derive(Debug, Clone)]
pub struct WordRelationModel {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl WordRelationModel {
    pub fn new(dim: usize) -> WordRelationModel {
        WordRelationModel {
            dim,
            vectors: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, token: &str, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(CcdpError::ModelDimensionMismatch {
                expected: self.dim,
                actual: vector.len(),
            });
        }
        self.vectors.entry(token.to_string()).or_insert(vector);
        Ok(())
    }

    pub fn vocabulary_len(&self) -> usize {
        self.vectors.len()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.vectors.contains_key(token)
    }

    pub fn relation(&self, t1: &str, t2: &str) -> f64 {
        if t1 == t2 {
            return 1.0;
        }
        let (Some(v1), Some(v2)) = (self.vectors.get(t1), self.vectors.get(t2)) else {
            return 0.0;
        };
        let dot: f64 = v1.iter().zip(v2).map(|(a, b)| a * b).sum();
        let n1: f64 = v1.iter().map(|a| a * a).sum::<f64>().sqrt();
        let n2: f64 = v2.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n1 == 0.0 || n2 == 0.0 {
            return 0.0;
        }
        let cos = (dot / (n1 * n2)).max(0.0);
        (cos * cos).clamp(0.0, 1.0)
    }
}

/// Load a textual word-vector file: first line `count dim`, then one
/// `token v1 .. vd` line per token. Duplicates keep the first occurrence.
pub fn load_word_vectors(path: &Path) -> Result<(WordRelationModel, Vec<String>)> {
    let file = std::fs::File::open(path)?;
    read_word_vectors(file)
}

pub fn read_word_vectors<R: Read>(reader: R) -> Result<(WordRelationModel, Vec<String>)> {
    let reader = BufReader::new(reader);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or(CcdpError::MalformedVectorFile {
            line: 1,
            message: "empty file".into(),
        })?;
    let mut head = header.split_whitespace();
    let (count, dim) = match (
        head.next().and_then(|s| s.parse::<usize>().ok()),
        head.next().and_then(|s| s.parse::<usize>().ok()),
    ) {
        (Some(c), Some(d)) if d > 0 => (c, d),
        _ => {
            return Err(CcdpError::MalformedVectorFile {
                line: 1,
                message: format!("expected header \"count dim\", got {header:?}"),
            })
        }
    };

    let mut model = WordRelationModel::new(dim);
    let mut warnings = Vec::new();
    let mut seen = 0usize;
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let token = fields.next().unwrap().to_lowercase();
        let values: std::result::Result<Vec<f64>, _> =
            fields.map(|f| f.parse::<f64>()).collect();
        let values = values.map_err(|e| CcdpError::MalformedVectorFile {
            line: line_no,
            message: e.to_string(),
        })?;
        if values.len() != dim {
            return Err(CcdpError::MalformedVectorFile {
                line: line_no,
                message: format!("expected {dim} components, got {}", values.len()),
            });
        }
        if model.contains(&token) {
            warnings.push(format!(
                "duplicate token {token:?} at line {line_no}, keeping first"
            ));
        } else {
            model.insert(&token, values)?;
        }
        seen += 1;
    }
    if seen < count {
        return Err(CcdpError::MalformedVectorFile {
            line: seen + 1,
            message: format!("header declared {count} vectors, found {seen}"),
        });
    }
    Ok((model, warnings))
}

/// Soft cosine: `x'My / sqrt(x'Mx * y'My)` over the union vocabulary, with
/// `M[i][j] = relation(ti, tj)` and a unit diagonal.
#[derive(Debug, Clone)]
pub struct SoftCosine {
    model: WordRelationModel,
}

impl SoftCosine {
    pub fn new(model: WordRelationModel) -> SoftCosine {
        SoftCosine { model }
    }

    pub fn model(&self) -> &WordRelationModel {
        &self.model
    }
}

impl SimilarityProvider for SoftCosine {
    fn similarity(&self, a: &TokenBag, b: &TokenBag) -> f64 {
        soft_cosine_similarity(a, b, &self.model)
    }
}

pub fn soft_cosine_similarity(a: &TokenBag, b: &TokenBag, model: &WordRelationModel) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    if a == b {
        return 1.0;
    }
    let union: Vec<&str> = {
        let mut u: Vec<&str> = a.tokens().map(|(t, _)| t).collect();
        u.extend(b.tokens().map(|(t, _)| t).filter(|t| a.weight(t) == 0.0));
        u.sort_unstable();
        u
    };
    let x: Vec<f64> = union.iter().map(|t| a.weight(t)).collect();
    let y: Vec<f64> = union.iter().map(|t| b.weight(t)).collect();

    let quad = |u: &[f64], v: &[f64]| -> f64 {
        let mut acc = 0.0;
        for (i, ti) in union.iter().enumerate() {
            for (j, tj) in union.iter().enumerate() {
                let m = model.relation(ti, tj);
                if m != 0.0 {
                    acc += u[i] * m * v[j];
                }
            }
        }
        acc
    };
    let xmy = quad(&x, &y);
    let xmx = quad(&x, &x);
    let ymy = quad(&y, &y);
    if xmx <= 0.0 || ymy <= 0.0 {
        return 0.0;
    }
    (xmy / (xmx * ymy).sqrt()).clamp(0.0, 1.0)
}
