//! Title validity: eight surface features and a logistic classifier over them.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dictionaries::bundled;
use crate::error::{Error, Result};
use crate::model::is_punctuation;

pub const FEATURE_ARITY: usize = 8;

const STOPWORDS: &[&str] = &[
    "a", "about", "after", "against", "all", "among", "an", "and", "any", "are", "as", "at", "be", "between", "both",
    "but", "by", "can", "do", "during", "each", "for", "from", "had", "has", "have", "how", "if", "in", "into", "is",
    "it", "its", "more", "most", "no", "nor", "not", "of", "on", "or", "other", "our", "over", "same", "should", "so",
    "some", "such", "than", "that", "the", "their", "them", "then", "there", "these", "they", "this", "those",
    "through", "to", "toward", "towards", "under", "until", "up", "upon", "via", "was", "we", "were", "what", "when",
    "where", "which", "while", "who", "why", "will", "with", "within", "without", "you",
];

fn is_stopword(t: &str) -> bool {
    STOPWORDS.binary_search(&t).is_ok()
}

/// Lowercased token with punctuation removed; may be empty.
fn term(token: &str) -> String {
    token.chars().filter(|c| !is_punctuation(*c)).flat_map(char::to_lowercase).collect()
}

/// Document frequencies of title terms.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IdfTable {
    pub doc_count: usize,
    pub df: HashMap<String, usize>,
}

impl IdfTable {
    pub fn from_titles<S: AsRef<str>>(titles: impl IntoIterator<Item = S>) -> Self {
        let mut table = IdfTable::default();
        for t in titles {
            table.doc_count += 1;
            let terms: HashSet<String> = t.as_ref().split_whitespace().map(term).filter(|x| !x.is_empty()).collect();
            for x in terms {
                *table.df.entry(x).or_insert(0) += 1;
            }
        }
        table
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// `ln(N / df)`; unseen terms get `ln(N)`.
    pub fn idf(&self, term: &str) -> f64 {
        if self.doc_count == 0 {
            return 0.0;
        }
        let n = self.doc_count as f64;
        match self.df.get(term) {
            Some(&df) if df > 0 => (n / df as f64).ln().max(0.0),
            _ => n.ln(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TitleFeatureVector {
    pub token_count: u32,
    pub special_char_count: u32,
    pub capital_letter_count: u32,
    pub max_consecutive_punct: u32,
    pub stopword_count: u32,
    pub tfidf_min: f64,
    pub tfidf_max: f64,
    pub tfidf_median: f64,
}

impl TitleFeatureVector {
    pub fn as_array(&self) -> [f64; FEATURE_ARITY] {
        [
            f64::from(self.token_count),
            f64::from(self.special_char_count),
            f64::from(self.capital_letter_count),
            f64::from(self.max_consecutive_punct),
            f64::from(self.stopword_count),
            self.tfidf_min,
            self.tfidf_max,
            self.tfidf_median,
        ]
    }
}

fn median(sorted: &[f64]) -> f64 {
    match sorted.len() {
        0 => 0.0,
        n if n % 2 == 1 => sorted[n / 2],
        n => (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0,
    }
}

pub fn extract_title_features(title: &str, idf: &IdfTable) -> TitleFeatureVector {
    let tokens: Vec<&str> = title.split_whitespace().collect();
    let mut f = TitleFeatureVector {
        token_count: tokens.len() as u32,
        ..Default::default()
    };
    let mut run = 0u32;
    for c in title.chars() {
        if !c.is_alphanumeric() && !c.is_whitespace() {
            f.special_char_count += 1;
        }
        if c.is_uppercase() {
            f.capital_letter_count += 1;
        }
        if is_punctuation(c) {
            run += 1;
            f.max_consecutive_punct = f.max_consecutive_punct.max(run);
        } else {
            run = 0;
        }
    }
    let terms: Vec<String> = tokens.iter().map(|t| term(t)).filter(|t| !t.is_empty()).collect();
    f.stopword_count = terms.iter().filter(|t| is_stopword(t)).count() as u32;
    if !terms.is_empty() {
        let mut tf: HashMap<&str, usize> = HashMap::new();
        for t in &terms {
            *tf.entry(t.as_str()).or_insert(0) += 1;
        }
        let total = terms.len() as f64;
        let mut scores: Vec<f64> = tf.iter().map(|(t, &c)| c as f64 / total * idf.idf(t)).collect();
        scores.sort_by(f64::total_cmp);
        f.tfidf_min = scores[0];
        f.tfidf_max = scores[scores.len() - 1];
        f.tfidf_median = median(&scores);
    }
    f
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TitleLabel {
    Valid,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTitleModel")]
pub struct TitleModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub threshold: f64,
}

#[derive(Deserialize)]
struct RawTitleModel {
    weights: Vec<f64>,
    bias: f64,
    threshold: f64,
}

impl TryFrom<RawTitleModel> for TitleModel {
    type Error = String;

    fn try_from(raw: RawTitleModel) -> std::result::Result<Self, String> {
        if raw.weights.len() != FEATURE_ARITY {
            return Err(format!("expected {FEATURE_ARITY} weights, got {}", raw.weights.len()));
        }
        if !(raw.threshold > 0.0 && raw.threshold < 1.0) {
            return Err(format!("threshold {} outside (0, 1)", raw.threshold));
        }
        Ok(TitleModel {
            weights: raw.weights,
            bias: raw.bias,
            threshold: raw.threshold,
        })
    }
}

impl TitleModel {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn bundled() -> Self {
        serde_json::from_str(bundled::TITLE_MODEL_JSON).expect("bundled title model is valid")
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Score is the probability of a valid title; `Invalid` iff score < threshold.
pub fn classify_title(f: &TitleFeatureVector, m: &TitleModel) -> Result<(TitleLabel, f64)> {
    if m.weights.len() != FEATURE_ARITY {
        return Err(Error::Arity {
            expected: m.weights.len(),
            got: FEATURE_ARITY,
        });
    }
    let z: f64 = m.weights.iter().zip(f.as_array()).map(|(w, x)| w * x).sum::<f64>() + m.bias;
    let score = sigmoid(z);
    let label = if score < m.threshold {
        TitleLabel::Invalid
    } else {
        TitleLabel::Valid
    };
    Ok((label, score))
}

#[derive(Debug, Clone, Copy)]
pub struct TrainingOptions {
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub threshold: f64,
}

impl Default for TrainingOptions {
    fn default() -> Self {
        TrainingOptions {
            seed: 17,
            epochs: 200,
            learning_rate: 0.05,
            l2: 1e-4,
            threshold: 0.5,
        }
    }
}

/// Logistic regression by seeded SGD on standardized features; the returned
/// weights apply to raw features.
pub fn train_title_classifier(
    examples: &[(TitleFeatureVector, TitleLabel)],
    opts: TrainingOptions,
) -> Result<TitleModel> {
    let valid = examples.iter().filter(|(_, l)| *l == TitleLabel::Valid).count();
    if valid == 0 || valid == examples.len() {
        return Err(Error::SingleClass(examples.len()));
    }
    let xs: Vec<[f64; FEATURE_ARITY]> = examples.iter().map(|(f, _)| f.as_array()).collect();
    let ys: Vec<f64> = examples
        .iter()
        .map(|(_, l)| if *l == TitleLabel::Valid { 1.0 } else { 0.0 })
        .collect();
    let n = xs.len() as f64;
    let mut mean = [0.0; FEATURE_ARITY];
    let mut sd = [0.0; FEATURE_ARITY];
    for x in &xs {
        for j in 0..FEATURE_ARITY {
            mean[j] += x[j] / n;
        }
    }
    for x in &xs {
        for j in 0..FEATURE_ARITY {
            sd[j] += (x[j] - mean[j]).powi(2) / n;
        }
    }
    for s in &mut sd {
        *s = if *s > 0.0 { s.sqrt() } else { 1.0 };
    }
    let zs: Vec<[f64; FEATURE_ARITY]> = xs
        .iter()
        .map(|x| std::array::from_fn(|j| (x[j] - mean[j]) / sd[j]))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut w = [0.0; FEATURE_ARITY];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..zs.len()).collect();
    for _ in 0..opts.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let z = &zs[i];
            let p = sigmoid(w.iter().zip(z).map(|(a, x)| a * x).sum::<f64>() + b);
            let g = p - ys[i];
            for j in 0..FEATURE_ARITY {
                w[j] -= opts.learning_rate * (g * z[j] + opts.l2 * w[j]);
            }
            b -= opts.learning_rate * g;
        }
    }
    let weights: Vec<f64> = (0..FEATURE_ARITY).map(|j| w[j] / sd[j]).collect();
    let bias = b - (0..FEATURE_ARITY).map(|j| w[j] * mean[j] / sd[j]).sum::<f64>();
    Ok(TitleModel {
        weights,
        bias,
        threshold: opts.threshold,
    })
}

const JUNK_NOUNS: &[&str] = &[
    "Recitals", "Recital", "Portfolio", "Project", "Report", "Thesis", "Dissertation", "Document", "Submission",
    "Manuscript", "Paper", "Abstract", "Appendix", "Slides", "Poster", "Draft", "Final", "Untitled", "Program",
];

/// Strings that are not plausible thesis titles: punctuation runs, one-token
/// fragments, acronym + noun stubs, identifiers and file names.
pub fn synthesize_junk_titles(n: usize, rng: &mut impl Rng, vocabulary: &[&str]) -> Vec<String> {
    const PUNCT: &[char] = &['-', '*', '.', '!', '?', '_', '#', '/', ':', ';', '(', ')', '"', '\''];
    let upper = |rng: &mut dyn rand::RngCore, k: usize| -> String {
        (0..k).map(|_| char::from(b'A' + rng.gen_range(0..26u8))).collect()
    };
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let s = match rng.gen_range(0..7) {
            0 => {
                let len = rng.gen_range(1..8);
                (0..len).map(|_| *PUNCT.choose(rng).unwrap()).collect()
            }
            1 => vocabulary.choose(rng).copied().unwrap_or("Untitled").to_string(),
            2 => {
                let k = rng.gen_range(2..5);
                format!("{} {}", upper(rng, k), JUNK_NOUNS.choose(rng).unwrap())
            }
            3 => format!("{}-{}-{:04}", upper(rng, 3), rng.gen_range(1990..2024), rng.gen_range(0..10000)),
            4 => {
                let stem = JUNK_NOUNS.choose(rng).unwrap().to_lowercase();
                format!("{stem}_final_v{}.pdf", rng.gen_range(1..9))
            }
            5 => format!(
                "{} {}",
                JUNK_NOUNS.choose(rng).unwrap(),
                ["I", "II", "1", "2", "A", "No. 3", "(Part 1)", "--"].choose(rng).unwrap()
            ),
            _ => {
                let k = rng.gen_range(2..7);
                upper(rng, k)
            }
        };
        out.push(s);
    }
    out
}

/// Valid bundled titles plus as many synthesized junk strings, shuffled.
pub fn bundled_title_corpus(seed: u64) -> Vec<(String, TitleLabel)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let titles = bundled::titles();
    let vocab: Vec<&str> = titles.iter().flat_map(|t| t.split_whitespace()).filter(|w| w.len() > 3).collect();
    let mut corpus: Vec<(String, TitleLabel)> = titles.iter().map(|t| (t.to_string(), TitleLabel::Valid)).collect();
    corpus.extend(
        synthesize_junk_titles(titles.len(), &mut rng, &vocab)
            .into_iter()
            .map(|t| (t, TitleLabel::Invalid)),
    );
    corpus.shuffle(&mut rng);
    corpus
}

#[derive(Debug, Clone)]
pub struct TrainedTitleModel {
    pub model: TitleModel,
    pub idf: IdfTable,
    /// (title, label) pairs not seen in training.
    pub holdout: Vec<(String, TitleLabel)>,
}

/// Trains on 80% of the bundled corpus; IDF comes from the training titles.
pub fn train_bundled_title_model(seed: u64) -> Result<TrainedTitleModel> {
    let corpus = bundled_title_corpus(seed);
    let cut = corpus.len() * 4 / 5;
    let (train, holdout) = corpus.split_at(cut);
    let idf = IdfTable::from_titles(train.iter().map(|(t, _)| t.as_str()));
    let examples: Vec<_> = train.iter().map(|(t, l)| (extract_title_features(t, &idf), *l)).collect();
    let model = train_title_classifier(
        &examples,
        TrainingOptions {
            seed,
            ..Default::default()
        },
    )?;
    Ok(TrainedTitleModel {
        model,
        idf,
        holdout: holdout.to_vec(),
    })
}
