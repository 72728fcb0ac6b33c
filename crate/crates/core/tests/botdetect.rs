use chrono::{DateTime, TimeZone, Utc};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tweetnet_core::botdetect::{
    classify_probability, cross_validate, decode_forest, encode_forest, extract_features, f1_score,
    feature_label_correlation, pearson, stratified_folds, synthetic_blobs, train_forest, ForestParams, N_FEATURES,
};
use tweetnet_core::{BotForest, Dataset, Error, UserProfile};

#[allow(clippy::too_many_arguments)]
fn profile(
    id: u64,
    screen_name: &str,
    description: &str,
    created_at: &str,
    counts: [u64; 5],
    flags: [bool; 3],
) -> UserProfile {
    UserProfile {
        user_id: id,
        screen_name: screen_name.into(),
        description: description.into(),
        location: String::new(),
        created_at: created_at.parse().unwrap(),
        statuses_count: counts[0],
        followers_count: counts[1],
        friends_count: counts[2],
        favourites_count: counts[3],
        listed_count: counts[4],
        default_profile: flags[0],
        verified: flags[1],
        geo_enabled: flags[2],
        complete: true,
    }
}

fn collection() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2022, 4, 25, 0, 0, 0).unwrap()
}

/// Vectors computed independently (Python float arithmetic) for the profiles below.
#[rustfmt::skip]
const EXPECTED: [[f64; N_FEATURES]; 10] = [
    [12000.0, 340.0, 410.0, 5600.0, 12.0, 0.0, 0.0, 1.0, 2519.5, 4.7628497717801155, 0.1349474102004366, 0.1627307005358206, 2.2226632268307203, 0.004762849771780115, 5.0, 0.0, 17.0],
    [45000.0, 12.0, 3100.0, 4.0, 0.0, 1.0, 0.0, 0.0, 36.0, 1250.0, 0.3333333333333333, 86.11111111111111, 0.1111111111111111, 0.0, 11.0, 8.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 4497.0, 0.0, 0.0, 0.0, 0.0, 0.0, 11.0, 0.0, 0.0],
    [250000.0, 180000.0, 520.0, 30.0, 2100.0, 0.0, 1.0, 1.0, 3514.618645833333, 71.1314726268755, 51.21466029135036, 0.14795346306390106, 0.008535776715225062, 0.5975043700657543, 8.0, 2.0, 24.0],
    [10.0, 1.0, 2.0, 3.0, 0.0, 1.0, 0.0, 0.0, 1.0, 10.0, 1.0, 2.0, 3.0, 0.0, 1.0, 0.0, 1.0],
    [3456.0, 789.0, 1011.0, 1213.0, 14.0, 0.0, 0.0, 1.0, 1151.000011574074, 3.0026063989987932, 0.6854908706047592, 0.8783666288737789, 1.0538661927041482, 0.012163336107055297, 9.0, 2.0, 19.0],
    [730.0, 73.0, 7.0, 0.0, 1.0, 1.0, 0.0, 0.0, 730.0, 1.0, 0.1, 0.009589041095890411, 0.0, 0.0013698630136986301, 6.0, 3.0, 3.0],
    [9999.0, 999.0, 99.0, 9.0, 0.0, 0.0, 0.0, 0.0, 114.04166666666667, 87.67848008768725, 8.759956156375594, 0.8681037632444282, 0.07891852393131166, 0.0, 11.0, 4.0, 16.0],
    [1.0, 2.0, 3.0, 4.0, 5.0, 0.0, 0.0, 1.0, 5032.4118055555555, 0.00019871187785070474, 0.0003974237557014095, 0.0005961356335521142, 0.000794847511402819, 0.0009935593892535237, 7.0, 0.0, 0.0],
    [500.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 500.0, 0.0, 0.0, 0.0, 0.0, 11.0, 5.0, 4.0],
];

pub fn fixture_profiles() -> Vec<UserProfile> {
    vec![
        profile(1, "alice", "Citoyenne engagée", "2015-06-01T12:00:00Z", [12000, 340, 410, 5600, 12], [false, false, true]),
        profile(2, "bot84721963", "", "2022-03-20T00:00:00Z", [45000, 12, 3100, 4, 0], [true, false, false]),
        profile(3, "jean_dupont", "", "2010-01-01T00:00:00Z", [0, 0, 0, 0, 0], [false, true, false]),
        profile(4, "news24fr", "Toute l'actualité 24h/24", "2012-09-09T09:09:09Z", [250000, 180000, 520, 30, 2100], [false, true, true]),
        profile(5, "x", "é", "2022-04-24T18:00:00Z", [10, 1, 2, 3, 0], [true, false, false]),
        profile(6, "mélanie75", "Paris ❤️ et le vélo", "2019-02-28T23:59:59Z", [3456, 789, 1011, 1213, 14], [false, false, true]),
        profile(7, "A1B2C3", "bio", "2020-04-25T00:00:00Z", [730, 73, 7, 0, 1], [true, false, false]),
        profile(8, "trader_2022", "crypto • finance", "2021-12-31T23:00:00Z", [9999, 999, 99, 9, 0], [false, false, false]),
        profile(9, "lecteur", "", "2008-07-14T14:07:00Z", [1, 2, 3, 4, 5], [false, false, true]),
        profile(10, "compte00000", "0000", "2022-04-25T00:00:00Z", [500, 0, 0, 0, 0], [true, false, false]),
    ]
}

#[test]
fn features_match_frozen_vectors() {
    for (p, want) in fixture_profiles().iter().zip(EXPECTED.iter()) {
        let got = extract_features::<f64>(p, collection()).unwrap();
        assert_eq!(&got, want, "profile {}", p.screen_name);
    }
}

#[test]
fn future_account_is_a_data_error() {
    let p = profile(1, "a", "", "2023-01-01T00:00:00Z", [0; 5], [false; 3]);
    assert!(matches!(extract_features::<f64>(&p, collection()), Err(Error::Data(_))));
}

fn textbook_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (sx, sy): (f64, f64) = (x.iter().sum(), y.iter().sum());
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|b| b * b).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

#[test]
fn pearson_matches_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let n = rng.random_range(3..200);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.3 * v + rng.random_range(-2.0..2.0)).collect();
        let r = pearson(&x, &y).unwrap();
        assert!((r - textbook_pearson(&x, &y)).abs() < 1e-12);
    }
    assert_eq!(pearson(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]), None);
}

#[test]
fn correlation_flags_constant_columns() {
    let d: Dataset = synthetic_blobs(200, 5);
    let mut features = d.features.clone();
    for row in &mut features {
        row[3] = 7.0;
    }
    let d = Dataset::new(features, d.labels).unwrap();
    let corr = feature_label_correlation(&d).unwrap();
    assert!(corr[3].constant && corr[3].r == 0.0);
    assert!(corr[0].r > 0.7);
}

#[test]
fn folds_are_stratified() {
    let labels: Vec<bool> = (0..103).map(|i| i % 4 == 0).collect();
    let folds = stratified_folds(&labels, 10, 3).unwrap();
    for f in 0..10 {
        let bots = (0..103).filter(|&i| folds[i] == f && labels[i]).count();
        let humans = (0..103).filter(|&i| folds[i] == f && !labels[i]).count();
        assert!((2..=3).contains(&bots), "fold {f}: {bots} bots");
        assert!((7..=8).contains(&humans));
    }
    assert!(stratified_folds(&labels[..20], 10, 3).is_err());
}

#[test]
fn cross_validation_matches_independent_loop() {
    let data: Dataset = synthetic_blobs(300, 8);
    let params = ForestParams {
        n_trees: 15,
        ..ForestParams::with_seed(4)
    };
    let cv = cross_validate(&data, 5, 77, params, 0.5).unwrap();

    let folds = stratified_folds(&data.labels, 5, 77).unwrap();
    let mut scores = Vec::new();
    for f in 0..5 {
        let train_idx: Vec<usize> = (0..data.len()).filter(|&i| folds[i] != f).collect();
        let test_idx: Vec<usize> = (0..data.len()).filter(|&i| folds[i] == f).collect();
        let forest = train_forest(
            &data.subset(&train_idx),
            ForestParams {
                seed: 4 + f as u64,
                ..params
            },
        )
        .unwrap();
        let predicted: Vec<bool> = test_idx
            .iter()
            .map(|&i| forest.predict_probability(&data.features[i]) >= 0.5)
            .collect();
        let actual: Vec<bool> = test_idx.iter().map(|&i| data.labels[i]).collect();
        let tp = predicted.iter().zip(&actual).filter(|(p, a)| **p && **a).count() as f64;
        let fp = predicted.iter().zip(&actual).filter(|(p, a)| **p && !**a).count() as f64;
        let fneg = predicted.iter().zip(&actual).filter(|(p, a)| !**p && **a).count() as f64;
        scores.push(2.0 * tp / (2.0 * tp + fp + fneg));
    }
    let mean = scores.iter().sum::<f64>() / 5.0;
    assert!((cv.mean_f1 - mean).abs() < 1e-9);
    assert_eq!(f1_score(&[true, false], &[false, false]), 0.0);
}

fn single_signal(n: usize, signal: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let bot = i % 2 == 0;
        let mut row = [0.0; N_FEATURES];
        for (f, v) in row.iter_mut().enumerate() {
            *v = if f == signal {
                if bot { 10.0 } else { 0.0 }
            } else {
                rng.random_range(0.0..1.0)
            };
        }
        features.push(row);
        labels.push(bot);
    }
    Dataset::new(features, labels).unwrap()
}

#[test]
fn importance_concentrates_on_the_signal() {
    let forest: BotForest = train_forest(&single_signal(2000, 9, 2), ForestParams::with_seed(1)).unwrap();
    let imp = forest.feature_importance();
    assert!(!imp.degenerate);
    assert!((imp.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(imp.weights[9] > 0.9, "weight {}", imp.weights[9]);
}

#[test]
fn noise_feature_ranks_below_informative_ones() {
    let mut data: Dataset = synthetic_blobs(600, 17);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for row in &mut data.features {
        row[16] = rng.random_range(-1.0..4.0);
    }
    let forest: BotForest = train_forest(&data, ForestParams::with_seed(3)).unwrap();
    let w = forest.feature_importance().weights;
    let informative_mean = w[..16].iter().sum::<f64>() / 16.0;
    assert!(w[16] < informative_mean, "noise {} vs mean {}", w[16], informative_mean);
}

#[test]
fn constant_data_gives_uniform_degenerate_importance() {
    let data = Dataset::new(vec![[1.0; N_FEATURES]; 10], (0..10).map(|i| i < 5).collect()).unwrap();
    let forest: BotForest = train_forest(&data, ForestParams::with_seed(1)).unwrap();
    let imp = forest.feature_importance();
    assert!(imp.degenerate);
    assert!(imp.weights.iter().all(|&w| (w - 1.0 / N_FEATURES as f64).abs() < 1e-15));
}

#[test]
fn forest_is_reproducible_and_serializes() {
    let data: Dataset = synthetic_blobs(200, 6);
    let a: BotForest = train_forest(&data, ForestParams { n_trees: 10, ..ForestParams::with_seed(9) }).unwrap();
    let b: BotForest = train_forest(&data, ForestParams { n_trees: 10, ..ForestParams::with_seed(9) }).unwrap();
    assert_eq!(a, b);
    let bytes = encode_forest(&a);
    assert_eq!(&bytes[..4], b"BF01");
    let back: BotForest = decode_forest(&bytes).unwrap();
    assert_eq!(back, a);
    assert!(decode_forest::<f64>(&bytes[..bytes.len() - 3]).is_err());
}

#[test]
fn f32_forest_trains() {
    let data: tweetnet_core::botdetect::Dataset<f32> = synthetic_blobs(200, 6);
    let forest = train_forest(&data, ForestParams { n_trees: 10, ..ForestParams::with_seed(9) }).unwrap();
    let hits = data
        .features
        .iter()
        .zip(&data.labels)
        .filter(|(x, &y)| (forest.predict_probability(x) >= 0.5) == y)
        .count();
    assert!(hits > 190);
}

proptest! {
    #[test]
    fn pearson_invariant_to_positive_affine_maps(
        xs in proptest::collection::vec(-100.0f64..100.0, 3..50),
        scale in 0.01f64..100.0,
        shift in -1e3f64..1e3,
    ) {
        let ys: Vec<f64> = xs.iter().enumerate().map(|(i, x)| x * 0.5 + (i % 3) as f64).collect();
        if let Some(r) = pearson(&xs, &ys) {
            let moved: Vec<f64> = xs.iter().map(|x| x * scale + shift).collect();
            let r2 = pearson(&moved, &ys).unwrap();
            prop_assert!((r - r2).abs() < 1e-9);
            prop_assert!((-1.0..=1.0).contains(&r));
        }
    }

    #[test]
    fn classification_monotone_in_threshold(p in 0.0f64..=1.0, t1 in 0.0f64..=1.0, t2 in 0.0f64..=1.0) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        // a bot at the higher threshold is a bot at the lower one
        if classify_probability(p, hi).is_bot {
            prop_assert!(classify_probability(p, lo).is_bot);
        }
    }
}
