//! Tweet and user record files.
//!
//! Both files are JSON Lines: one object per line. Tweet objects carry
//! `tweet_id`, `user_id`, `text`, `created_at` (RFC 3339), `hashtags`,
//! optional `retweeted_user_id` / `retweeted_status_id` and `lang`. User
//! objects carry the [`UserProfile`] fields under the same names.
//!
//! Malformed lines are skipped and counted. A file in which more than half of
//! the non-blank lines are malformed is rejected as a whole.

use std::collections::HashSet;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TWEETS_FILE: &str = "tweets.jsonl";
pub const USERS_FILE: &str = "users.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub tweet_id: u64,
    pub user_id: u64,
    pub text: String,
    pub created_at: DateTime<Utc>,
    #[serde(default)]
    pub hashtags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retweeted_user_id: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retweeted_status_id: Option<u64>,
    pub lang: String,
}

impl TweetRecord {
    /// Plain retweet (quotes and replies never carry a retweet link).
    pub fn is_retweet(&self) -> bool {
        self.retweeted_status_id.is_some()
    }

    /// Lowercases hashtags, strips a leading `#` and checks the record invariants.
    fn normalize(mut self) -> std::result::Result<Self, String> {
        if self.retweeted_user_id.is_some() != self.retweeted_status_id.is_some() {
            return Err("retweeted_user_id and retweeted_status_id must both be present or absent".into());
        }
        for tag in &mut self.hashtags {
            let t = tag.trim_start_matches('#').to_lowercase();
            if t.is_empty() || t.chars().any(char::is_whitespace) {
                return Err(format!("invalid hashtag {tag:?}"));
            }
            *tag = t;
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: u64,
    pub screen_name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub location: String,
    pub created_at: DateTime<Utc>,
    #[serde(default)]
    pub statuses_count: u64,
    #[serde(default)]
    pub followers_count: u64,
    #[serde(default)]
    pub friends_count: u64,
    #[serde(default)]
    pub favourites_count: u64,
    #[serde(default)]
    pub listed_count: u64,
    #[serde(default)]
    pub default_profile: bool,
    #[serde(default)]
    pub verified: bool,
    #[serde(default)]
    pub geo_enabled: bool,
    /// False when any metadata field was absent from the source record and defaulted.
    #[serde(default = "complete_default", skip_serializing)]
    pub complete: bool,
}

fn complete_default() -> bool {
    true
}

const PROFILE_OPTIONAL_FIELDS: [&str; 10] = [
    "description",
    "location",
    "statuses_count",
    "followers_count",
    "friends_count",
    "favourites_count",
    "listed_count",
    "default_profile",
    "verified",
    "geo_enabled",
];

/// Per-file parse statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub lines: usize,
    pub records: usize,
    pub malformed: usize,
    /// Records dropped because their id was already seen earlier in the file.
    pub duplicates: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub tweets: Vec<TweetRecord>,
    pub users: Vec<UserProfile>,
    pub tweet_stats: ParseStats,
    pub user_stats: ParseStats,
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_lines<T, F>(path: &Path, content: &str, parse: F, id: fn(&T) -> u64) -> Result<(Vec<T>, ParseStats)>
where
    T: Send,
    F: Fn(&str) -> std::result::Result<T, String> + Sync,
{
    let lines: Vec<&str> = content.lines().filter(|l| !l.trim().is_empty()).collect();
    let parsed: Vec<std::result::Result<T, String>> = lines.par_iter().map(|l| parse(l)).collect();

    let mut stats = ParseStats {
        lines: lines.len(),
        ..Default::default()
    };
    let mut seen = HashSet::with_capacity(lines.len());
    let mut out = Vec::with_capacity(lines.len());
    for (lineno, r) in parsed.into_iter().enumerate() {
        match r {
            Ok(rec) => {
                if seen.insert(id(&rec)) {
                    out.push(rec);
                } else {
                    stats.duplicates += 1;
                }
            }
            Err(msg) => {
                stats.malformed += 1;
                log::debug!("{}:{}: {msg}", path.display(), lineno + 1);
            }
        }
    }
    stats.records = out.len();
    if stats.malformed * 2 > stats.lines {
        return Err(Error::CorpusFormat {
            path: path.to_path_buf(),
            malformed: stats.malformed,
            total: stats.lines,
        });
    }
    if stats.malformed > 0 {
        log::warn!("{}: skipped {} malformed line(s)", path.display(), stats.malformed);
    }
    Ok((out, stats))
}

pub fn parse_tweet_line(line: &str) -> std::result::Result<TweetRecord, String> {
    serde_json::from_str::<TweetRecord>(line)
        .map_err(|e| e.to_string())?
        .normalize()
}

pub fn parse_user_line(line: &str) -> std::result::Result<UserProfile, String> {
    let value: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let complete = value
        .as_object()
        .map(|o| PROFILE_OPTIONAL_FIELDS.iter().all(|f| o.contains_key(*f)))
        .unwrap_or(false);
    let mut user: UserProfile = serde_json::from_value(value).map_err(|e| e.to_string())?;
    user.complete = complete;
    Ok(user)
}

pub fn parse_tweets(path: &Path) -> Result<(Vec<TweetRecord>, ParseStats)> {
    let content = read_to_string(path)?;
    parse_lines(path, &content, parse_tweet_line, |t| t.tweet_id)
}

pub fn parse_users(path: &Path) -> Result<(Vec<UserProfile>, ParseStats)> {
    let content = read_to_string(path)?;
    parse_lines(path, &content, parse_user_line, |u| u.user_id)
}

pub fn parse_corpus(tweet_file: &Path, user_file: &Path) -> Result<Corpus> {
    let (tweets, tweet_stats) = parse_tweets(tweet_file)?;
    let (users, user_stats) = parse_users(user_file)?;
    Ok(Corpus {
        tweets,
        users,
        tweet_stats,
        user_stats,
    })
}

/// Resolves a tweets argument that may name either a file or an ingest output directory.
pub fn tweets_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join(TWEETS_FILE)
    } else {
        p.to_path_buf()
    }
}

pub fn users_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join(USERS_FILE)
    } else {
        p.to_path_buf()
    }
}

/// One keyword per line; blank lines and `#` comments ignored; lowercased.
pub fn load_keywords(path: &Path) -> Result<Vec<String>> {
    let content = read_to_string(path)?;
    Ok(content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect())
}

/// Keeps tweets whose lowercased text contains any keyword. Accents are not folded.
pub fn filter_by_keywords(tweets: &[TweetRecord], keywords: &[String]) -> Result<Vec<TweetRecord>> {
    if keywords.is_empty() {
        return Err(Error::Argument("keyword list is empty".into()));
    }
    if let Some(bad) = keywords.iter().find(|k| k.is_empty() || k.to_lowercase() != **k) {
        return Err(Error::Argument(format!("keyword {bad:?} must be non-empty and lowercase")));
    }
    Ok(tweets
        .iter()
        .filter(|t| {
            let text = t.text.to_lowercase();
            keywords.iter().any(|k| text.contains(k.as_str()))
        })
        .cloned()
        .collect())
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| Error::Data(e.to_string()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tweet(id: u64, text: &str) -> TweetRecord {
        TweetRecord {
            tweet_id: id,
            user_id: 1,
            text: text.into(),
            created_at: "2022-04-01T10:00:00Z".parse().unwrap(),
            hashtags: vec![],
            retweeted_user_id: None,
            retweeted_status_id: None,
            lang: "fr".into(),
        }
    }

    fn kw(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn keyword_containment() {
        let tweets = vec![tweet(1, "Vive l'élection!"), tweet(2, "bonjour")];
        let kept = filter_by_keywords(&tweets, &kw(&["élection"])).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].tweet_id, 1);
    }

    #[test]
    fn keyword_case_folds_but_keeps_accents() {
        let tweets = vec![tweet(1, "PRÉSIDENTIELLE 2022"), tweet(2, "presidentielle")];
        let kept = filter_by_keywords(&tweets, &kw(&["présidentielle"])).unwrap();
        assert_eq!(kept.iter().map(|t| t.tweet_id).collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn empty_keywords_rejected() {
        assert!(matches!(filter_by_keywords(&[], &[]), Err(Error::Argument(_))));
        assert!(matches!(
            filter_by_keywords(&[], &kw(&["Macron"])),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn hashtags_normalized() {
        let line = r##"{"tweet_id":1,"user_id":2,"text":"x","created_at":"2022-04-01T10:00:00Z","hashtags":["#Macron2022"],"lang":"fr"}"##;
        let t = parse_tweet_line(line).unwrap();
        assert_eq!(t.hashtags, vec!["macron2022"]);
    }

    #[test]
    fn half_retweet_link_is_malformed() {
        let line = r#"{"tweet_id":1,"user_id":2,"text":"x","created_at":"2022-04-01T10:00:00Z","hashtags":[],"retweeted_user_id":5,"lang":"fr"}"#;
        assert!(parse_tweet_line(line).is_err());
    }

    #[test]
    fn hashtag_with_space_is_malformed() {
        let line = r#"{"tweet_id":1,"user_id":2,"text":"x","created_at":"2022-04-01T10:00:00Z","hashtags":["a b"],"lang":"fr"}"#;
        assert!(parse_tweet_line(line).is_err());
    }

    #[test]
    fn partial_profile_flagged_incomplete() {
        let full = r#"{"user_id":1,"screen_name":"a","description":"","location":"","created_at":"2020-01-01T00:00:00Z","statuses_count":1,"followers_count":1,"friends_count":1,"favourites_count":1,"listed_count":0,"default_profile":false,"verified":false,"geo_enabled":true}"#;
        assert!(parse_user_line(full).unwrap().complete);
        let partial = r#"{"user_id":1,"screen_name":"a","created_at":"2020-01-01T00:00:00Z"}"#;
        let u = parse_user_line(partial).unwrap();
        assert!(!u.complete);
        assert_eq!(u.followers_count, 0);
        assert!(!u.verified);
    }
}
