use std::collections::{BTreeMap, HashMap};

use chrono::Utc;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tweetnet_core::graph::{read_rtg, write_rtg};
use tweetnet_core::{build_retweet_graph, Error, RetweetGraph, TweetRecord};

fn retweet(id: u64, user: u64, source: u64) -> TweetRecord {
    TweetRecord {
        tweet_id: id,
        user_id: user,
        text: String::new(),
        created_at: Utc::now(),
        hashtags: vec![],
        retweeted_user_id: Some(source),
        retweeted_status_id: Some(id + 1_000_000),
        lang: "fr".into(),
    }
}

fn random_events(seed: u64, n: usize, users: u64) -> Vec<TweetRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n as u64)
        .map(|i| retweet(i, rng.random_range(1..=users), rng.random_range(1..=users)))
        .collect()
}

#[test]
fn edge_weights_match_counting_oracle() {
    let events = random_events(100, 100, 12);
    let g = build_retweet_graph(&events);
    let mut oracle: HashMap<(u64, u64), u64> = HashMap::new();
    for t in &events {
        *oracle.entry((t.user_id, t.retweeted_user_id.unwrap())).or_default() += 1;
    }
    let mut seen = 0;
    for u in 0..g.node_count() {
        for (v, w) in g.neighbors(u) {
            assert_eq!(oracle[&(g.node_id(u), g.node_id(v))], w);
            seen += 1;
        }
    }
    assert_eq!(seen, oracle.len());
    assert_eq!(g.total_weight(), 100);
}

#[test]
fn undirected_projection_matches_transpose_and_add() {
    let g = build_retweet_graph(&random_events(7, 400, 30));
    let u = g.to_undirected().unwrap();
    let mut oracle: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    for a in 0..g.node_count() {
        for (b, w) in g.neighbors(a) {
            let (x, y) = (g.node_id(a), g.node_id(b));
            if x != y {
                *oracle.entry((x.min(y), x.max(y))).or_default() += w;
            }
        }
    }
    let got: BTreeMap<(u64, u64), u64> = u.edges().map(|(a, b, w)| ((a, b), w)).collect();
    assert_eq!(got, oracle);
    // symmetric adjacency
    for a in 0..u.node_count() {
        for (b, w) in u.neighbors(a) {
            assert!(u.neighbors(b).any(|(c, w2)| c == a && w2 == w));
        }
    }
    assert!(matches!(u.to_undirected(), Err(Error::Argument(_))));
}

#[test]
fn degrees_match_naive_scan() {
    let g = build_retweet_graph(&random_events(9, 300, 25)).to_undirected().unwrap();
    let edges: Vec<(u64, u64, u64)> = g.edges().collect();
    for &id in g.node_ids() {
        let deg = edges.iter().filter(|e| e.0 == id || e.1 == id).count();
        let wdeg: u64 = edges.iter().filter(|e| e.0 == id || e.1 == id).map(|e| e.2).sum();
        assert_eq!(g.degree(id).unwrap(), deg);
        assert_eq!(g.weighted_degree(id).unwrap(), wdeg);
    }
    assert!(matches!(g.degree(999_999), Err(Error::UnknownNode(999_999))));
}

#[test]
fn rtg_roundtrip() {
    let g = build_retweet_graph(&random_events(5, 200, 40));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.rtg");
    write_rtg(&g, &p).unwrap();
    assert_eq!(read_rtg(&p).unwrap(), g);
    std::fs::write(&p, b"RTG1\x01").unwrap();
    assert!(read_rtg(&p).is_err());
}

#[test]
fn authors_without_retweets_are_isolated_nodes() {
    let mut t = retweet(1, 5, 6);
    t.retweeted_user_id = None;
    t.retweeted_status_id = None;
    let g = build_retweet_graph(&[t, retweet(2, 7, 8)]);
    assert_eq!(g.node_ids(), &[5, 7, 8]);
    assert_eq!(g.degree(5).unwrap(), 0);
    let empty: RetweetGraph = build_retweet_graph(&[]);
    assert!(empty.is_empty());
}
