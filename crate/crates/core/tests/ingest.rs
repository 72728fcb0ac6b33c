use std::collections::HashSet;
use std::fmt::Write as _;

use chrono::{TimeZone, Utc};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tweetnet_core::ingest::{filter_by_keywords, parse_corpus, parse_tweet_line, parse_tweets, write_jsonl};
use tweetnet_core::{Error, TweetRecord};

const WORDS: [&str; 12] = [
    "vote", "élection", "meeting", "France", "candidat", "soir", "Présidentielle", "débat", "programme", "rien", "météo",
    "foot",
];

fn random_line(rng: &mut ChaCha8Rng, id: u64) -> String {
    let n = rng.random_range(1..8);
    let text: Vec<&str> = (0..n).map(|_| WORDS[rng.random_range(0..WORDS.len())]).collect();
    let mut v = serde_json::json!({
        "tweet_id": id,
        "user_id": rng.random_range(1..500u64),
        "text": text.join(" "),
        "created_at": "2022-04-01T10:00:00Z",
        "hashtags": ["Vote2022"],
        "lang": "fr",
    });
    if rng.random_bool(0.4) {
        v["retweeted_user_id"] = rng.random_range(1..500u64).into();
        v["retweeted_status_id"] = (id / 2).into();
    }
    v.to_string()
}

#[test]
fn ten_thousand_lines_match_schema_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    let mut content = String::new();
    for i in 0..10_000u64 {
        let line = match i % 250 {
            17 => "{\"tweet_id\": 1, \"text\": ".to_string(),
            18 => serde_json::json!({"tweet_id": i, "user_id": 1}).to_string(),
            19 => String::new(),
            _ => random_line(&mut rng, 1_000_000 + i),
        };
        let _ = writeln!(content, "{line}");
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tweets.jsonl");
    std::fs::write(&path, &content).unwrap();

    // oracle: a line is a record iff it is JSON carrying every required field with the right type
    let required = ["tweet_id", "user_id", "text", "created_at", "lang"];
    let expected: Vec<u64> = content
        .lines()
        .filter_map(|l| serde_json::from_str::<Value>(l).ok())
        .filter(|v| required.iter().all(|k| v.get(k).is_some()))
        .map(|v| v["tweet_id"].as_u64().unwrap())
        .collect();

    let (records, stats) = parse_tweets(&path).unwrap();
    assert_eq!(stats.lines, 10_000 - 40, "blank lines are not counted");
    assert_eq!(records.len(), expected.len());
    assert_eq!(stats.malformed, 80);
    assert_eq!(records.iter().map(|t| t.tweet_id).collect::<Vec<_>>(), expected);
    assert!(records.iter().all(|t| t.hashtags == ["vote2022"]));
}

#[test]
fn keyword_filter_matches_grep_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1_000);
    let tweets: Vec<TweetRecord> = (0..1_000u64)
        .map(|i| parse_tweet_line(&random_line(&mut rng, i + 1)).unwrap())
        .collect();
    let keywords = vec!["présidentielle".to_string(), "candidat".to_string()];
    let kept = filter_by_keywords(&tweets, &keywords).unwrap();
    // grep -i equivalent
    let oracle: Vec<u64> = tweets
        .iter()
        .filter(|t| {
            let l = t.text.to_lowercase();
            l.contains("présidentielle") || l.contains("candidat")
        })
        .map(|t| t.tweet_id)
        .collect();
    assert_eq!(kept.iter().map(|t| t.tweet_id).collect::<Vec<_>>(), oracle);
    assert!(!oracle.is_empty() && oracle.len() < 1_000);
}

#[test]
fn keyword_errors() {
    let t: Vec<TweetRecord> = Vec::new();
    assert!(matches!(filter_by_keywords(&t, &[]), Err(Error::Argument(_))));
    assert!(matches!(filter_by_keywords(&t, &["Vote".into()]), Err(Error::Argument(_))));
}

#[test]
fn mostly_malformed_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let tweets = dir.path().join("t.jsonl");
    let users = dir.path().join("u.jsonl");
    std::fs::write(&tweets, "garbage\nnope\n{}\n").unwrap();
    std::fs::write(&users, "").unwrap();
    assert!(matches!(parse_corpus(&tweets, &users), Err(Error::CorpusFormat { .. })));
}

#[test]
fn duplicate_ids_keep_first() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.jsonl");
    let a = r#"{"tweet_id":5,"user_id":1,"text":"a","created_at":"2022-04-01T00:00:00Z","lang":"fr"}"#;
    let b = r#"{"tweet_id":5,"user_id":2,"text":"b","created_at":"2022-04-01T00:00:00Z","lang":"fr"}"#;
    std::fs::write(&p, format!("{a}\n{b}\n")).unwrap();
    let (records, stats) = parse_tweets(&p).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].user_id, 1);
    assert_eq!(stats.duplicates, 1);
}

fn arb_tweet() -> impl Strategy<Value = TweetRecord> {
    (
        any::<u64>(),
        any::<u64>(),
        "[a-zA-Zéè #@.]{0,40}",
        0i64..2_000_000_000,
        proptest::collection::vec("[a-z0-9_]{1,12}", 0..4),
        proptest::option::of((any::<u64>(), any::<u64>())),
        "[a-z]{2}",
    )
        .prop_map(|(tweet_id, user_id, text, secs, hashtags, rt, lang)| TweetRecord {
            tweet_id,
            user_id,
            text,
            created_at: Utc.timestamp_opt(secs, 0).unwrap(),
            hashtags,
            retweeted_user_id: rt.map(|r| r.0),
            retweeted_status_id: rt.map(|r| r.1),
            lang,
        })
}

proptest! {
    #[test]
    fn serialize_then_parse_roundtrips(t in arb_tweet()) {
        let line = serde_json::to_string(&t).unwrap();
        prop_assert_eq!(parse_tweet_line(&line).unwrap(), t);
    }

    #[test]
    fn filter_is_idempotent_subsequence(
        tweets in proptest::collection::vec(arb_tweet(), 0..40),
        kws in proptest::collection::vec("[a-zé]{1,3}", 1..4),
    ) {
        let once = filter_by_keywords(&tweets, &kws).unwrap();
        let twice = filter_by_keywords(&once, &kws).unwrap();
        prop_assert_eq!(&once, &twice);
        let mut it = tweets.iter();
        for kept in &once {
            prop_assert!(it.any(|t| t == kept));
        }
    }
}

#[test]
fn jsonl_roundtrip_through_files() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tweets: Vec<TweetRecord> = (0..50u64).map(|i| parse_tweet_line(&random_line(&mut rng, i + 1)).unwrap()).collect();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.jsonl");
    write_jsonl(&p, &tweets).unwrap();
    let (back, _) = parse_tweets(&p).unwrap();
    assert_eq!(back, tweets);
    let ids: HashSet<u64> = back.iter().map(|t| t.tweet_id).collect();
    assert_eq!(ids.len(), 50);
}
