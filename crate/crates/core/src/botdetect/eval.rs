//! Stratified cross-validation, F1 and feature/label correlation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dataset::Dataset;
use super::features::{BotFeatureVector, N_FEATURES};
use super::forest::{train_forest, ForestParams};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// F1 of the positive (bot) class; 0 when there are no true positives.
pub fn f1_score(predicted: &[bool], actual: &[bool]) -> f64 {
    assert_eq!(predicted.len(), actual.len());
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&p, &a) in predicted.iter().zip(actual) {
        match (p, a) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    if tp == 0 {
        return 0.0;
    }
    2.0 * tp as f64 / (2.0 * tp as f64 + fp as f64 + fn_ as f64)
}

/// Fold index per sample. Humans then bots are each shuffled with one seeded
/// generator and dealt round-robin, so every fold gets both classes.
pub fn stratified_folds(labels: &[bool], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Argument("at least 2 folds are required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; labels.len()];
    for class in [false, true] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < folds {
            return Err(Error::Data(format!(
                "cannot stratify {} {} sample(s) into {folds} folds",
                idx.len(),
                if class { "bot" } else { "human" }
            )));
        }
        idx.shuffle(&mut rng);
        for (pos, &i) in idx.iter().enumerate() {
            assignment[i] = pos % folds;
        }
    }
    Ok(assignment)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub mean_f1: f64,
    pub fold_f1: Vec<f64>,
}

/// Cross-validates an arbitrary learner: `learner(fold, train, test_rows)` returns one bot/human call per test row.
pub fn cross_validate_with<F, L>(data: &Dataset<F>, folds: usize, seed: u64, mut learner: L) -> Result<CvResult>
where
    F: Scalar,
    L: FnMut(usize, &Dataset<F>, &[BotFeatureVector<F>]) -> Result<Vec<bool>>,
{
    let assignment = stratified_folds(&data.labels, folds, seed)?;
    let mut fold_f1 = Vec::with_capacity(folds);
    for fold in 0..folds {
        let (test_idx, train_idx): (Vec<usize>, Vec<usize>) = (0..data.len()).partition(|&i| assignment[i] == fold);
        let train = data.subset(&train_idx);
        let test = data.subset(&test_idx);
        let predicted = learner(fold, &train, &test.features)?;
        if predicted.len() != test.len() {
            return Err(Error::Argument("learner returned the wrong number of predictions".into()));
        }
        fold_f1.push(f1_score(&predicted, &test.labels));
    }
    let mean_f1 = fold_f1.iter().sum::<f64>() / folds as f64;
    Ok(CvResult { mean_f1, fold_f1 })
}

/// Random-forest cross-validation; fold `i` trains with seed `params.seed + i`.
pub fn cross_validate<F: Scalar>(
    data: &Dataset<F>,
    folds: usize,
    seed: u64,
    params: ForestParams,
    threshold: f64,
) -> Result<CvResult> {
    cross_validate_with(data, folds, seed, |fold, train, test| {
        let forest = train_forest(
            train,
            ForestParams {
                seed: params.seed.wrapping_add(fold as u64),
                ..params
            },
        )?;
        Ok(test.iter().map(|x| forest.classify(x, threshold).is_bot).collect())
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation<F> {
    pub r: F,
    /// Feature (or label) column was constant; `r` reported as 0.
    pub constant: bool,
}

/// Pearson correlation; `None` when either column has zero variance.
pub fn pearson<F: Scalar>(x: &[F], y: &[F]) -> Option<F> {
    assert_eq!(x.len(), y.len());
    let n = F::of_usize(x.len());
    let mx = x.iter().copied().sum::<F>() / n;
    let my = y.iter().copied().sum::<F>() / n;
    let (mut sxy, mut sxx, mut syy) = (F::zero(), F::zero(), F::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx <= F::zero() || syy <= F::zero() {
        return None;
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Some(r.max(-F::one()).min(F::one()))
}

/// Pearson r between every feature column and the 0/1 bot label.
pub fn feature_label_correlation<F: Scalar>(data: &Dataset<F>) -> Result<[Correlation<F>; N_FEATURES]> {
    if data.len() < 2 {
        return Err(Error::Data("correlation needs at least 2 samples".into()));
    }
    let y: Vec<F> = data.labels.iter().map(|&b| if b { F::one() } else { F::zero() }).collect();
    let mut out = [Correlation {
        r: F::zero(),
        constant: true,
    }; N_FEATURES];
    let mut column = Vec::with_capacity(data.len());
    for (f, slot) in out.iter_mut().enumerate() {
        column.clear();
        column.extend(data.features.iter().map(|row| row[f]));
        if let Some(r) = pearson(&column, &y) {
            *slot = Correlation { r, constant: false };
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f1_edges() {
        assert_eq!(f1_score(&[true, false, true], &[true, false, true]), 1.0);
        assert_eq!(f1_score(&[false, false], &[true, false]), 0.0);
        assert!((f1_score(&[true, true, false], &[true, false, true]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn folds_are_stratified() {
        let labels: Vec<bool> = (0..53).map(|i| i % 3 == 0).collect();
        let a = stratified_folds(&labels, 5, 1).unwrap();
        for f in 0..5 {
            let members: Vec<_> = (0..53).filter(|&i| a[i] == f).collect();
            assert!(members.iter().any(|&i| labels[i]));
            assert!(members.iter().any(|&i| !labels[i]));
        }
        assert!(stratified_folds(&labels, 1, 1).is_err());
        assert!(matches!(stratified_folds(&[true, false, false], 2, 1), Err(Error::Data(_))));
    }

    #[test]
    fn oracle_predictors() {
        let data: Dataset<f64> = crate::botdetect::synthetic_blobs(60, 2);
        // label leaked through a sentinel column for the perfect predictor
        let mut leaked = data.clone();
        for (row, &b) in leaked.features.iter_mut().zip(&data.labels) {
            row[0] = if b { 1.0 } else { 0.0 };
        }
        let perfect = cross_validate_with(&leaked, 10, 1, |_, _, test| Ok(test.iter().map(|x| x[0] == 1.0).collect())).unwrap();
        assert_eq!(perfect.mean_f1, 1.0);
        let negative = cross_validate_with(&data, 10, 1, |_, _, test| Ok(vec![false; test.len()])).unwrap();
        assert_eq!(negative.mean_f1, 0.0);
    }

    #[test]
    fn correlation_extremes() {
        let labels = vec![true, false, true, true, false];
        let features: Vec<[f64; N_FEATURES]> = labels
            .iter()
            .map(|&b| {
                let mut row = [2.0; N_FEATURES];
                row[0] = if b { 1.0 } else { 0.0 };
                row[1] = if b { 0.0 } else { 1.0 };
                row
            })
            .collect();
        let d = Dataset::new(features, labels).unwrap();
        let c = feature_label_correlation(&d).unwrap();
        assert!((c[0].r - 1.0).abs() < 1e-15);
        assert!((c[1].r + 1.0).abs() < 1e-15);
        assert!(c[2].constant);
        assert_eq!(c[2].r, 0.0);
        let one = Dataset::<f64>::new(vec![[0.0; N_FEATURES]], vec![true]).unwrap();
        assert!(feature_label_correlation(&one).is_err());
    }
}
