use std::collections::HashMap;
use std::path::Path;

use chrono::{DateTime, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::features::{extract_features, BotFeatureVector, FEATURE_NAMES, N_FEATURES};
use crate::csvio;
use crate::error::{Error, Result};
use crate::ingest::UserProfile;
use crate::scalar::Scalar;

/// Labeled feature vectors; `true` marks a bot.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset<F> {
    pub features: Vec<BotFeatureVector<F>>,
    pub labels: Vec<bool>,
}

impl<F: Scalar> Dataset<F> {
    pub fn new(features: Vec<BotFeatureVector<F>>, labels: Vec<bool>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::Argument(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        if let Some(i) = features.iter().position(|row| row.iter().any(|v| !v.is_finite())) {
            return Err(Error::Data(format!("row {i} has a non-finite feature")));
        }
        Ok(Dataset { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn bots(&self) -> usize {
        self.labels.iter().filter(|&&b| b).count()
    }

    pub fn humans(&self) -> usize {
        self.len() - self.bots()
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        Dataset {
            features: idx.iter().map(|&i| self.features[i]).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Feature CSV: the 17 named columns plus `label` (`bot`/`human` or `1`/`0`).
    pub fn load_csv(path: &Path) -> Result<Self> {
        let mut rdr = csvio::reader(path)?;
        let headers = rdr.headers().map_err(|e| csvio::csv_err(path, e))?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| Error::Data(format!("{}: missing column {name}", path.display())))
        };
        let feature_cols = FEATURE_NAMES.iter().map(|n| col(n)).collect::<Result<Vec<_>>>()?;
        let label_col = col("label")?;
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| csvio::csv_err(path, e))?;
            let mut row = [F::zero(); N_FEATURES];
            for (slot, &c) in row.iter_mut().zip(&feature_cols) {
                let v: f64 = rec[c]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Data(format!("{}: row {}: bad number {:?}", path.display(), i + 2, &rec[c])))?;
                *slot = F::of_f64(v);
            }
            features.push(row);
            labels.push(parse_label(&rec[label_col]).ok_or_else(|| {
                Error::Data(format!("{}: row {}: bad label {:?}", path.display(), i + 2, &rec[label_col]))
            })?);
        }
        Dataset::new(features, labels)
    }

    /// Raw profile CSV: [`UserProfile`] columns plus `label`; features extracted at `collection_date`.
    pub fn load_raw_csv(path: &Path, collection_date: DateTime<Utc>) -> Result<Self> {
        let mut rdr = csvio::reader(path)?;
        let headers = rdr.headers().map_err(|e| csvio::csv_err(path, e))?.clone();
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| csvio::csv_err(path, e))?;
            let fields: HashMap<&str, &str> = headers.iter().zip(rec.iter()).collect();
            let bad = |what: &str| Error::Data(format!("{}: row {}: {what}", path.display(), i + 2));
            let get = |k: &str| fields.get(k).map(|s| s.trim()).filter(|s| !s.is_empty());
            let count = |k: &str| -> Result<u64> {
                get(k).map_or(Ok(0), |s| s.parse().map_err(|_| bad(&format!("bad {k}"))))
            };
            let boolean = |k: &str| -> Result<bool> {
                match get(k).map(str::to_lowercase).as_deref() {
                    None | Some("false") | Some("0") => Ok(false),
                    Some("true") | Some("1") => Ok(true),
                    Some(_) => Err(bad(&format!("bad {k}"))),
                }
            };
            let profile = UserProfile {
                user_id: count("user_id")?,
                screen_name: get("screen_name").unwrap_or("").to_string(),
                description: fields.get("description").copied().unwrap_or("").to_string(),
                location: get("location").unwrap_or("").to_string(),
                created_at: get("created_at")
                    .ok_or_else(|| bad("missing created_at"))?
                    .parse()
                    .map_err(|_| bad("bad created_at"))?,
                statuses_count: count("statuses_count")?,
                followers_count: count("followers_count")?,
                friends_count: count("friends_count")?,
                favourites_count: count("favourites_count")?,
                listed_count: count("listed_count")?,
                default_profile: boolean("default_profile")?,
                verified: boolean("verified")?,
                geo_enabled: boolean("geo_enabled")?,
                complete: true,
            };
            features.push(extract_features(&profile, collection_date)?);
            labels.push(get("label").and_then(parse_label).ok_or_else(|| bad("bad label"))?);
        }
        Dataset::new(features, labels)
    }

    pub fn write_csv(&self, path: &Path, header_comment: Option<&str>) -> Result<()> {
        let mut cols: Vec<&str> = FEATURE_NAMES.to_vec();
        cols.push("label");
        let mut w = csvio::create(path, header_comment, &cols)?;
        for (row, &bot) in self.features.iter().zip(&self.labels) {
            let mut rec: Vec<String> = row.iter().map(|v| v.as_f64().to_string()).collect();
            rec.push(if bot { "bot" } else { "human" }.to_string());
            w.write_record(&rec).map_err(|e| csvio::csv_err(path, e))?;
        }
        csvio::finish(w, path)
    }
}

fn parse_label(s: &str) -> Option<bool> {
    match s.trim().to_lowercase().as_str() {
        "bot" | "1" => Some(true),
        "human" | "0" => Some(false),
        _ => None,
    }
}

/// Distance between the two blob centres along every axis.
pub const BLOB_SEPARATION: f64 = 3.0;

/// Two isotropic unit-variance Gaussian blobs in 17 dimensions: humans centred
/// at the origin, bots at `BLOB_SEPARATION` on every axis. Labels alternate so
/// the classes are balanced. The centres are `3 * sqrt(17) ~ 12.4` standard
/// deviations apart.
pub fn synthetic_blobs<F: Scalar>(n: usize, seed: u64) -> Dataset<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let bot = i % 2 == 1;
        let centre = if bot { BLOB_SEPARATION } else { 0.0 };
        let mut row = [F::zero(); N_FEATURES];
        for v in row.iter_mut() {
            *v = F::of_f64(centre + normal.sample(&mut rng));
        }
        features.push(row);
        labels.push(bot);
    }
    Dataset { features, labels }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blobs_balanced_and_reproducible() {
        let a: Dataset<f64> = synthetic_blobs(100, 3);
        let b: Dataset<f64> = synthetic_blobs(100, 3);
        assert_eq!(a, b);
        assert_eq!(a.bots(), 50);
    }

    #[test]
    fn feature_csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        let d: Dataset<f64> = synthetic_blobs(10, 1);
        d.write_csv(&p, Some("x")).unwrap();
        assert_eq!(Dataset::<f64>::load_csv(&p).unwrap(), d);
    }

    #[test]
    fn raw_csv() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("raw.csv");
        std::fs::write(
            &p,
            "screen_name,description,created_at,statuses_count,followers_count,default_profile,label\n\
             ab12,hi,2022-01-01T00:00:00Z,100,10,true,bot\n\
             cd,,2021-12-22T00:00:00Z,5,,false,human\n",
        )
        .unwrap();
        let d = Dataset::<f64>::load_raw_csv(&p, "2022-01-11T00:00:00Z".parse().unwrap()).unwrap();
        assert_eq!(d.labels, vec![true, false]);
        assert_eq!(d.features[0][9], 10.0);
        assert_eq!(d.features[0][15], 2.0);
        assert_eq!(d.features[1][8], 20.0);
    }

    #[test]
    fn rejects_bad_label() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        let mut header = FEATURE_NAMES.join(",");
        header.push_str(",label\n");
        let row = vec!["0"; 17].join(",") + ",maybe\n";
        std::fs::write(&p, header + &row).unwrap();
        assert!(Dataset::<f64>::load_csv(&p).is_err());
    }
}
