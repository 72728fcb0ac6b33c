//! Offensive-tweet tallies per community.
//!
//! Retweets are dropped, remaining tweets deduplicated on whitespace-normalized
//! text, each unique tweet scored by a [`TweetScorer`] and counted offensive
//! when its probability reaches the threshold.

mod scorer;

pub use scorer::{
    load_labeled_csv, train_baseline, BaselineLinear, ExternalScores, LabeledText, TrainedBaseline, TweetScorer,
    TrainOptions,
};

use std::collections::HashSet;
use std::path::Path;

use rayon::prelude::*;

use crate::analytics::tweets_by_community;
use crate::csvio;
use crate::error::{Error, Result};
use crate::ingest::TweetRecord;
use crate::partition::Partition;
use crate::scalar::{round_to, Scalar};

pub const DEFAULT_OFFENSE_THRESHOLD: f64 = 0.5;

/// Collapses whitespace runs to one space and trims.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Original tweets with distinct normalized text, first occurrence by ascending tweet id.
pub fn dedup_unique<'a>(tweets: &[&'a TweetRecord]) -> Vec<&'a TweetRecord> {
    let mut originals: Vec<&TweetRecord> = tweets.iter().copied().filter(|t| !t.is_retweet()).collect();
    originals.sort_by_key(|t| t.tweet_id);
    let mut seen = HashSet::with_capacity(originals.len());
    originals
        .into_iter()
        .filter(|t| seen.insert(normalize_whitespace(&t.text)))
        .collect()
}

/// `round(offensive / unique, 3)`, 0 when there are no unique tweets.
pub fn offensive_proportion(offensive: usize, unique: usize) -> f64 {
    if unique == 0 {
        0.0
    } else {
        round_to(offensive as f64 / unique as f64, 3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffenseRow {
    pub unique_tweets: usize,
    pub offensive_tweets: usize,
    pub proportion: f64,
    /// Set when the community has no unique tweets and the proportion is a placeholder 0.
    pub empty: bool,
}

impl OffenseRow {
    pub fn from_counts(unique_tweets: usize, offensive_tweets: usize) -> Self {
        OffenseRow {
            unique_tweets,
            offensive_tweets,
            proportion: offensive_proportion(offensive_tweets, unique_tweets),
            empty: unique_tweets == 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OffenseReport {
    pub communities: Vec<OffenseRow>,
}

pub fn offense_report<F: Scalar, S: TweetScorer + ?Sized>(
    tweets: &[TweetRecord],
    partition: &Partition<F>,
    scorer: &S,
    threshold: f64,
) -> Result<OffenseReport> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::Argument(format!("threshold {threshold} outside [0, 1]")));
    }
    let groups = tweets_by_community(tweets, partition);
    let scored: Vec<(OffenseRow, Vec<u64>)> = groups
        .par_iter()
        .map(|group| {
            let unique = dedup_unique(group);
            let mut missing = Vec::new();
            let mut offensive = 0;
            for t in &unique {
                match scorer.score(t) {
                    Some(p) if p >= threshold => offensive += 1,
                    Some(_) => {}
                    None => missing.push(t.tweet_id),
                }
            }
            (OffenseRow::from_counts(unique.len(), offensive), missing)
        })
        .collect();
    let mut missing: Vec<u64> = scored.iter().flat_map(|(_, m)| m.iter().copied()).collect();
    if !missing.is_empty() {
        missing.sort_unstable();
        return Err(Error::MissingScores(missing));
    }
    Ok(OffenseReport {
        communities: scored.into_iter().map(|(r, _)| r).collect(),
    })
}

/// `community,unique_tweets,offensive_tweets,proportion`
pub fn write_offense_csv(report: &OffenseReport, path: &Path, header_comment: Option<&str>) -> Result<()> {
    let mut w = csvio::create(
        path,
        header_comment,
        &["community", "unique_tweets", "offensive_tweets", "proportion"],
    )?;
    for (c, r) in report.communities.iter().enumerate() {
        w.write_record([
            c.to_string(),
            r.unique_tweets.to_string(),
            r.offensive_tweets.to_string(),
            format!("{:.3}", r.proportion),
        ])
        .map_err(|e| csvio::csv_err(path, e))?;
    }
    csvio::finish(w, path)
}
