//! Random forest of Gini decision trees.
//!
//! Each tree is grown on a bootstrap sample until its leaves are pure or hold
//! fewer than `min_samples_split` samples. At every node `max_features`
//! candidate features are drawn without replacement (constant ones are
//! skipped and do not count against the budget) and the split with the lowest
//! weighted Gini impurity wins; ties keep the first candidate found. Leaves
//! store the fraction of bots among their training samples and the forest
//! probability is the mean leaf fraction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::dataset::Dataset;
use super::features::{BotFeatureVector, N_FEATURES};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_N_TREES: usize = 100;
pub const DEFAULT_BOT_THRESHOLD: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Features tried per split; `None` means `ceil(sqrt(17)) = 5`.
    pub max_features: Option<usize>,
    pub min_samples_split: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: DEFAULT_N_TREES,
            max_features: None,
            min_samples_split: 2,
            seed: 42,
        }
    }
}

impl ForestParams {
    pub fn with_seed(seed: u64) -> Self {
        ForestParams {
            seed,
            ..Default::default()
        }
    }

    pub fn features_per_split(&self) -> usize {
        self.max_features
            .unwrap_or_else(|| (N_FEATURES as f64).sqrt().ceil() as usize)
            .clamp(1, N_FEATURES)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode<F> {
    Split {
        feature: usize,
        threshold: F,
        /// Impurity decrease weighted by the node's share of the bootstrap sample.
        gain: F,
        left: usize,
        right: usize,
    },
    Leaf {
        bot_fraction: F,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree<F> {
    pub(crate) nodes: Vec<TreeNode<F>>,
}

impl<F: Scalar> DecisionTree<F> {
    pub fn nodes(&self) -> &[TreeNode<F>] {
        &self.nodes
    }

    /// Rebuilds a tree from its node table, checking child links and feature indices.
    pub fn from_nodes(nodes: Vec<TreeNode<F>>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Format("tree without nodes".into()));
        }
        for (i, n) in nodes.iter().enumerate() {
            match *n {
                TreeNode::Split {
                    feature, left, right, ..
                } => {
                    if feature >= N_FEATURES || left <= i || right <= i || left >= nodes.len() || right >= nodes.len() {
                        return Err(Error::Format(format!("tree node {i} has invalid links")));
                    }
                }
                TreeNode::Leaf { bot_fraction } => {
                    if !(bot_fraction >= F::zero() && bot_fraction <= F::one()) {
                        return Err(Error::Format(format!("tree node {i} has leaf value outside [0, 1]")));
                    }
                }
            }
        }
        Ok(DecisionTree { nodes })
    }

    pub fn predict(&self, x: &BotFeatureVector<F>) -> F {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { bot_fraction } => return bot_fraction,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    fn gains(&self) -> [F; N_FEATURES] {
        let mut out = [F::zero(); N_FEATURES];
        for n in &self.nodes {
            if let TreeNode::Split { feature, gain, .. } = *n {
                out[feature] = out[feature] + gain;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BotForest<F> {
    pub(crate) trees: Vec<DecisionTree<F>>,
    pub(crate) seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub is_bot: bool,
    pub probability: f64,
}

/// Normalized mean decrease in Gini impurity.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureImportance<F> {
    pub weights: [F; N_FEATURES],
    /// No tree split on anything; weights are uniform.
    pub degenerate: bool,
}

fn gini<F: Scalar>(bots: usize, total: usize) -> F {
    if total == 0 {
        return F::zero();
    }
    let p = F::of_usize(bots) / F::of_usize(total);
    F::of_f64(2.0) * p * (F::one() - p)
}

struct SplitChoice<F> {
    feature: usize,
    threshold: F,
    impurity: F,
}

struct TreeBuilder<'a, F> {
    data: &'a Dataset<F>,
    features_per_split: usize,
    min_samples_split: usize,
    n_root: F,
}

impl<F: Scalar> TreeBuilder<'_, F> {
    fn best_split(&self, samples: &[usize], rng: &mut ChaCha8Rng) -> Option<SplitChoice<F>> {
        let n = samples.len();
        let total_bots = samples.iter().filter(|&&i| self.data.labels[i]).count();
        let mut candidates: Vec<usize> = (0..N_FEATURES).collect();
        candidates.shuffle(rng);

        let mut best: Option<SplitChoice<F>> = None;
        let mut tried = 0;
        let mut column: Vec<(F, bool)> = Vec::with_capacity(n);
        for f in candidates {
            if tried == self.features_per_split {
                break;
            }
            column.clear();
            column.extend(samples.iter().map(|&i| (self.data.features[i][f], self.data.labels[i])));
            column.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));
            if column[0].0 == column[n - 1].0 {
                continue;
            }
            tried += 1;

            let mut left_bots = 0;
            for k in 0..n - 1 {
                if column[k].1 {
                    left_bots += 1;
                }
                let (lo, hi) = (column[k].0, column[k + 1].0);
                if lo == hi {
                    continue;
                }
                let n_left = k + 1;
                let n_right = n - n_left;
                let impurity = (F::of_usize(n_left) * gini::<F>(left_bots, n_left)
                    + F::of_usize(n_right) * gini::<F>(total_bots - left_bots, n_right))
                    / F::of_usize(n);
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    let mid = lo + (hi - lo) / F::of_f64(2.0);
                    let threshold = if mid < hi { mid } else { lo };
                    best = Some(SplitChoice {
                        feature: f,
                        threshold,
                        impurity,
                    });
                }
            }
        }
        best
    }

    fn build(&self, root_samples: Vec<usize>, rng: &mut ChaCha8Rng) -> DecisionTree<F> {
        let mut nodes: Vec<TreeNode<F>> = vec![TreeNode::Leaf { bot_fraction: F::zero() }];
        let mut stack = vec![(0usize, root_samples)];
        while let Some((slot, samples)) = stack.pop() {
            let n = samples.len();
            let bots = samples.iter().filter(|&&i| self.data.labels[i]).count();
            let leaf = TreeNode::Leaf {
                bot_fraction: F::of_usize(bots) / F::of_usize(n),
            };
            if bots == 0 || bots == n || n < self.min_samples_split {
                nodes[slot] = leaf;
                continue;
            }
            let Some(split) = self.best_split(&samples, rng) else {
                nodes[slot] = leaf;
                continue;
            };
            let (left, right): (Vec<usize>, Vec<usize>) = samples
                .iter()
                .partition(|&&i| self.data.features[i][split.feature] <= split.threshold);
            debug_assert!(!left.is_empty() && !right.is_empty());
            let weight = F::of_usize(n) / self.n_root;
            let gain = weight * (gini::<F>(bots, n) - split.impurity);
            let l = nodes.len();
            nodes.push(TreeNode::Leaf { bot_fraction: F::zero() });
            nodes.push(TreeNode::Leaf { bot_fraction: F::zero() });
            nodes[slot] = TreeNode::Split {
                feature: split.feature,
                threshold: split.threshold,
                gain: gain.max(F::zero()),
                left: l,
                right: l + 1,
            };
            stack.push((l + 1, right));
            stack.push((l, left));
        }
        DecisionTree { nodes }
    }
}

/// Per-tree random stream: the forest seed with the tree index as stream id.
fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    rng
}

pub fn train_forest<F: Scalar>(data: &Dataset<F>, params: ForestParams) -> Result<BotForest<F>> {
    if data.is_empty() {
        return Err(Error::Training("empty training set".into()));
    }
    if data.bots() == 0 || data.humans() == 0 {
        return Err(Error::Training("training data must contain both bots and humans".into()));
    }
    if params.n_trees == 0 {
        return Err(Error::Argument("n_trees must be positive".into()));
    }
    let builder = TreeBuilder {
        data,
        features_per_split: params.features_per_split(),
        min_samples_split: params.min_samples_split.max(2),
        n_root: F::of_usize(data.len()),
    };
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(params.seed, t);
            let n = data.len();
            let sample: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            builder.build(sample, &mut rng)
        })
        .collect();
    Ok(BotForest {
        trees,
        seed: params.seed,
    })
}

impl<F: Scalar> BotForest<F> {
    pub fn from_trees(trees: Vec<DecisionTree<F>>, seed: u64) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::Format("forest without trees".into()));
        }
        Ok(BotForest { trees, seed })
    }

    pub fn trees(&self) -> &[DecisionTree<F>] {
        &self.trees
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn predict_probability(&self, x: &BotFeatureVector<F>) -> F {
        let sum: F = self.trees.iter().map(|t| t.predict(x)).sum();
        sum / F::of_usize(self.trees.len())
    }

    pub fn classify(&self, x: &BotFeatureVector<F>, threshold: f64) -> Classification {
        classify_probability(self.predict_probability(x).as_f64(), threshold)
    }

    pub fn feature_importance(&self) -> FeatureImportance<F> {
        let mut acc = [F::zero(); N_FEATURES];
        let mut contributing = 0usize;
        for t in &self.trees {
            let g = t.gains();
            let total: F = g.iter().copied().sum();
            if total > F::zero() {
                contributing += 1;
                for (a, v) in acc.iter_mut().zip(g) {
                    *a = *a + v / total;
                }
            }
        }
        let total: F = acc.iter().copied().sum();
        if contributing == 0 || total <= F::zero() {
            return FeatureImportance {
                weights: [F::one() / F::of_usize(N_FEATURES); N_FEATURES],
                degenerate: true,
            };
        }
        FeatureImportance {
            weights: acc.map(|a| a / total),
            degenerate: false,
        }
    }
}

/// Bot iff `probability >= threshold`.
pub fn classify_probability(probability: f64, threshold: f64) -> Classification {
    Classification {
        is_bot: probability >= threshold,
        probability,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::botdetect::dataset::synthetic_blobs;

    fn one_feature_data() -> Dataset<f64> {
        let mut features = vec![];
        let mut labels = vec![];
        for i in 0..40 {
            let mut row = [0.0; N_FEATURES];
            row[3] = i as f64;
            features.push(row);
            labels.push(i >= 20);
        }
        Dataset::new(features, labels).unwrap()
    }

    #[test]
    fn separable_training_accuracy() {
        let d = one_feature_data();
        let forest = train_forest(&d, ForestParams::with_seed(1)).unwrap();
        let correct = d
            .features
            .iter()
            .zip(&d.labels)
            .filter(|(x, &y)| forest.classify(x, 0.5).is_bot == y)
            .count();
        assert_eq!(correct, d.len());
        let imp = forest.feature_importance();
        assert!(!imp.degenerate);
        assert!((imp.weights[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_threshold() {
        assert!(classify_probability(0.76, 0.75).is_bot);
        assert!(!classify_probability(0.74, 0.75).is_bot);
        assert!(classify_probability(0.75, 0.75).is_bot);
    }

    #[test]
    fn single_class_rejected() {
        let d = Dataset::<f64>::new(vec![[0.0; N_FEATURES]; 3], vec![true; 3]).unwrap();
        assert!(matches!(train_forest(&d, ForestParams::default()), Err(Error::Training(_))));
    }

    #[test]
    fn identical_features_degenerate() {
        let d = Dataset::<f64>::new(vec![[1.0; N_FEATURES]; 6], vec![true, false, true, false, true, false]).unwrap();
        let forest = train_forest(&d, ForestParams { n_trees: 5, ..Default::default() }).unwrap();
        let imp = forest.feature_importance();
        assert!(imp.degenerate);
        let s: f64 = imp.weights.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        let p = forest.predict_probability(&[1.0; N_FEATURES]);
        assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn reproducible_and_f32() {
        let d: Dataset<f64> = synthetic_blobs(200, 9);
        let a = train_forest(&d, ForestParams { n_trees: 10, ..ForestParams::with_seed(3) }).unwrap();
        let b = train_forest(&d, ForestParams { n_trees: 10, ..ForestParams::with_seed(3) }).unwrap();
        assert_eq!(a, b);
        let d32: Dataset<f32> = synthetic_blobs(200, 9);
        let f32_forest = train_forest(&d32, ForestParams { n_trees: 10, ..Default::default() }).unwrap();
        let p = f32_forest.predict_probability(&d32.features[1]);
        assert!(p > 0.5);
    }

    #[test]
    fn tree_validation() {
        assert!(DecisionTree::<f64>::from_nodes(vec![]).is_err());
        let bad = vec![TreeNode::Split {
            feature: 17,
            threshold: 0.0,
            gain: 0.0,
            left: 1,
            right: 2,
        }];
        assert!(DecisionTree::<f64>::from_nodes(bad).is_err());
    }
}
