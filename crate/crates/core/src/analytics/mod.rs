//! Per-community profiling: hashtag usage, word n-grams and regional spread.

mod geo;
mod hashtags;
mod ngrams;

pub use geo::{
    attach_region_values, normalize_location, region_histogram, write_geo_csv, Gazetteer, RegionCount,
    RegionHistogram, METROPOLITAN_REGIONS,
};
pub use hashtags::{hashtag_frequencies, write_hashtags_csv, HashtagFrequencyTable};
pub use ngrams::{load_stopwords, ngram_frequencies, parse_stopwords, tokenize, write_ngrams_csv, NgramTable};

use std::collections::HashMap;

use crate::ingest::TweetRecord;
use crate::partition::Partition;
use crate::scalar::Scalar;

/// Groups tweets by the community of their author; tweets by non-members are dropped.
pub(crate) fn tweets_by_community<'a, F: Scalar>(
    tweets: &'a [TweetRecord],
    partition: &Partition<F>,
) -> Vec<Vec<&'a TweetRecord>> {
    let mut out = vec![Vec::new(); partition.community_count()];
    let mut cache: HashMap<u64, Option<usize>> = HashMap::new();
    for t in tweets {
        let c = *cache
            .entry(t.user_id)
            .or_insert_with(|| partition.community_of(t.user_id));
        if let Some(c) = c {
            out[c].push(t);
        }
    }
    out
}
