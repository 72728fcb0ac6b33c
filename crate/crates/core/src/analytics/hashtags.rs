use std::collections::{HashMap, HashSet};
use std::path::Path;

use rayon::prelude::*;

use super::tweets_by_community;
use crate::csvio;
use crate::error::Result;
use crate::ingest::TweetRecord;
use crate::partition::Partition;
use crate::scalar::Scalar;

/// Per community, `(hashtag, distinct users)` sorted by count descending then hashtag.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HashtagFrequencyTable {
    pub communities: Vec<Vec<(String, usize)>>,
}

impl HashtagFrequencyTable {
    pub fn top(&self, community: usize, n: usize) -> &[(String, usize)] {
        let rows = &self.communities[community];
        &rows[..n.min(rows.len())]
    }
}

/// A hashtag's frequency is the number of distinct community members who used it.
pub fn hashtag_frequencies<F: Scalar>(
    tweets: &[TweetRecord],
    partition: &Partition<F>,
    top_n: usize,
) -> HashtagFrequencyTable {
    let groups = tweets_by_community(tweets, partition);
    let communities = groups
        .par_iter()
        .map(|group| {
            let mut users_per_tag: HashMap<&str, HashSet<u64>> = HashMap::new();
            for t in group {
                for tag in &t.hashtags {
                    users_per_tag.entry(tag.as_str()).or_default().insert(t.user_id);
                }
            }
            let mut rows: Vec<(String, usize)> = users_per_tag
                .into_iter()
                .map(|(tag, users)| (tag.to_lowercase(), users.len()))
                .collect();
            rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            rows.truncate(top_n);
            rows
        })
        .collect();
    HashtagFrequencyTable { communities }
}

/// `community,hashtag,user_count`
pub fn write_hashtags_csv(table: &HashtagFrequencyTable, path: &Path, header_comment: Option<&str>) -> Result<()> {
    let mut w = csvio::create(path, header_comment, &["community", "hashtag", "user_count"])?;
    for (c, rows) in table.communities.iter().enumerate() {
        for (tag, n) in rows {
            w.write_record([c.to_string(), tag.clone(), n.to_string()])
                .map_err(|e| csvio::csv_err(path, e))?;
        }
    }
    csvio::finish(w, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(id: u64, user: u64, tags: &[&str]) -> TweetRecord {
        TweetRecord {
            tweet_id: id,
            user_id: user,
            text: String::new(),
            created_at: "2022-04-01T00:00:00Z".parse().unwrap(),
            hashtags: tags.iter().map(|s| s.to_string()).collect(),
            retweeted_user_id: None,
            retweeted_status_id: None,
            lang: "fr".into(),
        }
    }

    #[test]
    fn counts_users_not_tweets() {
        let tweets: Vec<_> = (0..5).map(|i| t(i, 1, &["a"])).collect();
        let p: Partition<f64> = Partition::from_labels(&[1], &[0], 0.0);
        let table = hashtag_frequencies(&tweets, &p, 10);
        assert_eq!(table.communities, vec![vec![("a".to_string(), 1)]]);
    }

    #[test]
    fn sorted_and_truncated() {
        let tweets = vec![
            t(1, 1, &["b", "a"]),
            t(2, 2, &["b"]),
            t(3, 3, &["c"]),
            t(4, 4, &["zz"]),
            t(5, 9, &["b"]),
        ];
        let p: Partition<f64> = Partition::from_labels(&[1, 2, 3, 4], &[0, 0, 0, 1], 0.0);
        let table = hashtag_frequencies(&tweets, &p, 2);
        assert_eq!(table.communities[0], vec![("b".to_string(), 2), ("a".to_string(), 1)]);
        assert_eq!(table.communities[1], vec![("zz".to_string(), 1)]);
    }
}
