use std::collections::HashMap;
use std::path::Path;

use chrono::{DateTime, Utc};
use rayon::prelude::*;

use super::eval::Correlation;
use super::features::{extract_features, FEATURE_NAMES};
use super::forest::{BotForest, FeatureImportance};
use crate::csvio;
use crate::error::Result;
use crate::ingest::{TweetRecord, UserProfile};
use crate::partition::Partition;
use crate::scalar::{round_to, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BotRow {
    pub accounts: usize,
    pub bots: usize,
    pub bot_proportion: f64,
    /// All tweets by members, retweets included.
    pub tweets: usize,
    /// Tweets by members classified as bots.
    pub automated_tweets: usize,
    pub automated_proportion: f64,
    /// Members without a usable profile: counted as accounts, never classified.
    pub unclassified: usize,
}

/// `round(part / whole, 3)`, 0 for an empty whole.
pub fn ratio3(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        round_to(part as f64 / whole as f64, 3)
    }
}

impl BotRow {
    pub fn from_counts(accounts: usize, bots: usize, tweets: usize, automated_tweets: usize) -> Self {
        BotRow {
            accounts,
            bots,
            bot_proportion: ratio3(bots, accounts),
            tweets,
            automated_tweets,
            automated_proportion: ratio3(automated_tweets, tweets),
            unclassified: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BotReport {
    pub communities: Vec<BotRow>,
}

pub fn bot_report<F: Scalar>(
    profiles: &[UserProfile],
    tweets: &[TweetRecord],
    partition: &Partition<F>,
    forest: &BotForest<F>,
    threshold: f64,
    collection_date: DateTime<Utc>,
) -> BotReport {
    let by_id: HashMap<u64, &UserProfile> = profiles.iter().map(|p| (p.user_id, p)).collect();
    let mut tweet_counts: HashMap<u64, usize> = HashMap::new();
    for t in tweets {
        *tweet_counts.entry(t.user_id).or_default() += 1;
    }

    let communities = partition
        .communities()
        .par_iter()
        .map(|members| {
            let mut row = BotRow {
                accounts: members.len(),
                ..Default::default()
            };
            for id in members {
                let n_tweets = tweet_counts.get(id).copied().unwrap_or(0);
                row.tweets += n_tweets;
                let features = by_id
                    .get(id)
                    .and_then(|p| extract_features::<F>(p, collection_date).ok());
                match features {
                    Some(x) => {
                        if forest.classify(&x, threshold).is_bot {
                            row.bots += 1;
                            row.automated_tweets += n_tweets;
                        }
                    }
                    None => row.unclassified += 1,
                }
            }
            row.bot_proportion = ratio3(row.bots, row.accounts);
            row.automated_proportion = ratio3(row.automated_tweets, row.tweets);
            row
        })
        .collect();
    BotReport { communities }
}

/// `community,accounts,bots,bot_proportion,tweets,automated_tweets,automated_proportion,unclassified`
pub fn write_bot_csv(report: &BotReport, path: &Path, header_comment: Option<&str>) -> Result<()> {
    let mut w = csvio::create(
        path,
        header_comment,
        &[
            "community",
            "accounts",
            "bots",
            "bot_proportion",
            "tweets",
            "automated_tweets",
            "automated_proportion",
            "unclassified",
        ],
    )?;
    for (c, r) in report.communities.iter().enumerate() {
        w.write_record([
            c.to_string(),
            r.accounts.to_string(),
            r.bots.to_string(),
            format!("{:.3}", r.bot_proportion),
            r.tweets.to_string(),
            r.automated_tweets.to_string(),
            format!("{:.3}", r.automated_proportion),
            r.unclassified.to_string(),
        ])
        .map_err(|e| csvio::csv_err(path, e))?;
    }
    csvio::finish(w, path)
}

/// `feature,r`
pub fn write_correlation_csv<F: Scalar>(
    corr: &[Correlation<F>],
    path: &Path,
    header_comment: Option<&str>,
) -> Result<()> {
    let mut w = csvio::create(path, header_comment, &["feature", "r"])?;
    for (name, c) in FEATURE_NAMES.iter().zip(corr) {
        w.write_record([name.to_string(), format!("{:.6}", c.r.as_f64())])
            .map_err(|e| csvio::csv_err(path, e))?;
    }
    csvio::finish(w, path)
}

/// `feature,weight`
pub fn write_importance_csv<F: Scalar>(
    imp: &FeatureImportance<F>,
    path: &Path,
    header_comment: Option<&str>,
) -> Result<()> {
    let mut w = csvio::create(path, header_comment, &["feature", "weight"])?;
    for (name, v) in FEATURE_NAMES.iter().zip(imp.weights.iter()) {
        w.write_record([name.to_string(), format!("{:.6}", v.as_f64())])
            .map_err(|e| csvio::csv_err(path, e))?;
    }
    csvio::finish(w, path)
}
