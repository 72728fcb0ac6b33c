//! Per-tweet offensiveness scorers.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::analytics::tokenize;
use crate::csvio;
use crate::error::{Error, Result};
use crate::ingest::TweetRecord;

/// Probability in `[0, 1]` that a tweet is offensive; `None` when the scorer has no score for it.
pub trait TweetScorer: Sync {
    fn score(&self, tweet: &TweetRecord) -> Option<f64>;
}

/// Precomputed probabilities keyed by tweet id.
#[derive(Debug, Clone, Default)]
pub struct ExternalScores {
    scores: HashMap<u64, f64>,
}

#[derive(Deserialize)]
struct ScoreRow {
    tweet_id: u64,
    probability: f64,
}

impl ExternalScores {
    pub fn from_map(scores: HashMap<u64, f64>) -> Self {
        ExternalScores { scores }
    }

    /// Loads `tweet_id,probability` rows.
    pub fn load(path: &Path) -> Result<Self> {
        let mut rdr = csvio::reader(path)?;
        let mut scores = HashMap::new();
        for row in rdr.deserialize::<ScoreRow>() {
            let row = row.map_err(|e| csvio::csv_err(path, e))?;
            if !(0.0..=1.0).contains(&row.probability) {
                return Err(Error::Data(format!(
                    "{}: probability {} for tweet {} outside [0, 1]",
                    path.display(),
                    row.probability,
                    row.tweet_id
                )));
            }
            scores.insert(row.tweet_id, row.probability);
        }
        Ok(ExternalScores { scores })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

impl TweetScorer for ExternalScores {
    fn score(&self, tweet: &TweetRecord) -> Option<f64> {
        self.scores.get(&tweet.tweet_id).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledText {
    pub text: String,
    pub offensive: bool,
}

#[derive(Deserialize)]
struct LabeledRow {
    text: String,
    label: String,
}

/// Loads `text,label` rows with labels `normal` or `offensive`.
pub fn load_labeled_csv(path: &Path) -> Result<Vec<LabeledText>> {
    let mut rdr = csvio::reader(path)?;
    let mut out = Vec::new();
    for row in rdr.deserialize::<LabeledRow>() {
        let row = row.map_err(|e| csvio::csv_err(path, e))?;
        let offensive = match row.label.trim().to_lowercase().as_str() {
            "normal" => false,
            "offensive" => true,
            other => return Err(Error::Data(format!("{}: unknown label {other:?}", path.display()))),
        };
        out.push(LabeledText { text: row.text, offensive });
    }
    Ok(out)
}

/// Logistic regression over unigram counts.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineLinear {
    vocabulary: HashMap<String, usize>,
    weights: Vec<f64>,
    bias: f64,
}

impl BaselineLinear {
    fn features(&self, text: &str) -> Vec<(usize, f64)> {
        let mut counts: HashMap<usize, f64> = HashMap::new();
        for tok in tokenize(text, &HashSet::new()) {
            if let Some(&i) = self.vocabulary.get(&tok) {
                *counts.entry(i).or_default() += 1.0;
            }
        }
        let mut v: Vec<_> = counts.into_iter().collect();
        v.sort_unstable_by_key(|&(i, _)| i);
        v
    }

    fn logit(&self, features: &[(usize, f64)]) -> f64 {
        self.bias + features.iter().map(|&(i, x)| self.weights[i] * x).sum::<f64>()
    }

    pub fn probability(&self, text: &str) -> f64 {
        sigmoid(self.logit(&self.features(text)))
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn vocabulary_size(&self) -> usize {
        self.vocabulary.len()
    }
}

impl TweetScorer for BaselineLinear {
    fn score(&self, tweet: &TweetRecord) -> Option<f64> {
        Some(self.probability(&tweet.text))
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

#[derive(Debug, Clone, Copy)]
pub struct TrainOptions {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            epochs: 20,
            learning_rate: 0.1,
            l2: 1e-4,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainedBaseline {
    pub model: BaselineLinear,
    /// F1 of the offensive class on the held-out 20%.
    pub heldout_f1: f64,
    pub train_size: usize,
    pub test_size: usize,
}

/// Stratified 80/20 split, SGD on the 80%, F1 reported on the 20% at threshold 0.5.
pub fn train_baseline(data: &[LabeledText], opts: TrainOptions) -> Result<TrainedBaseline> {
    if data.is_empty() {
        return Err(Error::Training("no labeled rows".into()));
    }
    let pos: Vec<usize> = (0..data.len()).filter(|&i| data[i].offensive).collect();
    let neg: Vec<usize> = (0..data.len()).filter(|&i| !data[i].offensive).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Training("both normal and offensive rows are required".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for mut class in [neg, pos] {
        class.shuffle(&mut rng);
        let n_test = if class.len() >= 2 { (class.len() as f64 * 0.2).ceil() as usize } else { 0 };
        test.extend_from_slice(&class[..n_test]);
        train.extend_from_slice(&class[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();

    let mut vocab: Vec<String> = train
        .iter()
        .flat_map(|&i| tokenize(&data[i].text, &HashSet::new()))
        .collect();
    vocab.sort_unstable();
    vocab.dedup();
    let mut model = BaselineLinear {
        vocabulary: vocab.into_iter().enumerate().map(|(i, w)| (w, i)).collect(),
        weights: Vec::new(),
        bias: 0.0,
    };
    model.weights = vec![0.0; model.vocabulary.len()];

    let encoded: Vec<(Vec<(usize, f64)>, f64)> = train
        .iter()
        .map(|&i| (model.features(&data[i].text), if data[i].offensive { 1.0 } else { 0.0 }))
        .collect();
    let mut order: Vec<usize> = (0..encoded.len()).collect();
    for epoch in 0..opts.epochs {
        order.shuffle(&mut rng);
        let lr = opts.learning_rate / (1.0 + epoch as f64 * 0.1);
        for &j in &order {
            let (x, y) = &encoded[j];
            let err = sigmoid(model.logit(x)) - y;
            for &(i, v) in x {
                model.weights[i] -= lr * (err * v + opts.l2 * model.weights[i]);
            }
            model.bias -= lr * err;
        }
    }

    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for &i in &test {
        let predicted = model.probability(&data[i].text) >= 0.5;
        match (predicted, data[i].offensive) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            _ => {}
        }
    }
    let heldout_f1 = if tp == 0 {
        0.0
    } else {
        2.0 * tp as f64 / (2.0 * tp as f64 + fp as f64 + fn_ as f64)
    };
    Ok(TrainedBaseline {
        model,
        heldout_f1,
        train_size: train.len(),
        test_size: test.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(text: &str, offensive: bool) -> LabeledText {
        LabeledText {
            text: text.into(),
            offensive,
        }
    }

    fn toy() -> Vec<LabeledText> {
        (0..20)
            .flat_map(|i| [row(&format!("gentil {i}"), false), row(&format!("ordure {i}"), true)])
            .collect()
    }

    #[test]
    fn separable_toy_is_perfect() {
        let trained = train_baseline(&toy(), TrainOptions::default()).unwrap();
        assert_eq!(trained.heldout_f1, 1.0);
        assert_eq!(trained.test_size, 8);
        assert!(trained.model.probability("ordure") > 0.5);
        assert!(trained.model.probability("gentil") < 0.5);
    }

    #[test]
    fn deterministic() {
        let a = train_baseline(&toy(), TrainOptions::default()).unwrap();
        let b = train_baseline(&toy(), TrainOptions::default()).unwrap();
        assert_eq!(a.model, b.model);
    }

    #[test]
    fn degenerate_data_rejected() {
        assert!(matches!(train_baseline(&[], TrainOptions::default()), Err(Error::Training(_))));
        let one_class = vec![row("a", true), row("b", true)];
        assert!(matches!(train_baseline(&one_class, TrainOptions::default()), Err(Error::Training(_))));
    }

    #[test]
    fn external_probability_range_checked() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        std::fs::write(&p, "tweet_id,probability\n1,0.2\n2,1.5\n").unwrap();
        assert!(ExternalScores::load(&p).is_err());
        std::fs::write(&p, "tweet_id,probability\n1,0.2\n2,1\n").unwrap();
        assert_eq!(ExternalScores::load(&p).unwrap().len(), 2);
    }

    #[test]
    fn labeled_csv() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l.csv");
        std::fs::write(&p, "text,label\n\"bonjour, toi\",normal\nsale type,offensive\n").unwrap();
        let rows = load_labeled_csv(&p).unwrap();
        assert_eq!(rows, vec![row("bonjour, toi", false), row("sale type", true)]);
        std::fs::write(&p, "text,label\nx,hateful\n").unwrap();
        assert!(load_labeled_csv(&p).is_err());
    }
}
