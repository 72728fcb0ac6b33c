use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::tweets_by_community;
use crate::csvio;
use crate::error::{Error, Result};
use crate::ingest::TweetRecord;
use crate::partition::Partition;
use crate::scalar::Scalar;

/// Per community, `(ngram, occurrences)` over unigrams and bigrams, count descending then ngram.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NgramTable {
    pub communities: Vec<Vec<(String, usize)>>,
}

/// One word per line, `#` comments allowed; lowercased.
pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&content))
}

pub fn parse_stopwords(content: &str) -> HashSet<String> {
    content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

fn is_url(token: &str) -> bool {
    token.starts_with("http://") || token.starts_with("https://") || token.starts_with("www.")
}

/// Lowercases, drops URLs and @-mentions, removes `#`, splits on punctuation and whitespace, then drops stop words.
pub fn tokenize(text: &str, stopwords: &HashSet<String>) -> Vec<String> {
    let lower = text.to_lowercase();
    let mut out = Vec::new();
    for raw in lower.split_whitespace() {
        if is_url(raw) || raw.starts_with('@') {
            continue;
        }
        let cleaned: String = raw
            .chars()
            .filter(|&c| c != '#')
            .map(|c| if c.is_alphanumeric() { c } else { ' ' })
            .collect();
        out.extend(
            cleaned
                .split_whitespace()
                .filter(|t| !stopwords.contains(*t))
                .map(str::to_owned),
        );
    }
    out
}

pub fn ngram_frequencies<F: Scalar>(
    tweets: &[TweetRecord],
    partition: &Partition<F>,
    stopwords: &HashSet<String>,
    top_n: usize,
) -> NgramTable {
    let groups = tweets_by_community(tweets, partition);
    let communities = groups
        .par_iter()
        .map(|group| {
            let mut counts: HashMap<String, usize> = HashMap::new();
            for t in group {
                let tokens = tokenize(&t.text, stopwords);
                for tok in &tokens {
                    *counts.entry(tok.clone()).or_default() += 1;
                }
                for pair in tokens.windows(2) {
                    *counts.entry(format!("{} {}", pair[0], pair[1])).or_default() += 1;
                }
            }
            let mut rows: Vec<(String, usize)> = counts.into_iter().collect();
            rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            rows.truncate(top_n);
            rows
        })
        .collect();
    NgramTable { communities }
}

/// `community,ngram,count`
pub fn write_ngrams_csv(table: &NgramTable, path: &Path, header_comment: Option<&str>) -> Result<()> {
    let mut w = csvio::create(path, header_comment, &["community", "ngram", "count"])?;
    for (c, rows) in table.communities.iter().enumerate() {
        for (g, n) in rows {
            w.write_record([c.to_string(), g.clone(), n.to_string()])
                .map_err(|e| csvio::csv_err(path, e))?;
        }
    }
    csvio::finish(w, path)
}
