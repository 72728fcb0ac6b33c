//! Deterministic synthetic election corpus.
//!
//! Five partisan camps retweet mostly among themselves, with camp-specific
//! hashtags, vocabulary, home regions, bot shares and offensive-word rates.
//! A fringe of loosely attached users falls outside the dense core. The
//! generator also writes an offensive-text training set and a labelled
//! profile set for the bot classifier.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{CliError, Result};

pub const DEFAULT_SEED: u64 = 2022;
pub const N_TWEETS: usize = 10_000;

struct Camp {
    size: usize,
    hashtags: &'static [&'static str],
    words: &'static [&'static str],
    regions: &'static [&'static str],
    bot_share: f64,
    offensive_rate: f64,
}

const CAMPS: [Camp; 5] = [
    Camp {
        size: 110,
        hashtags: &["avecvous", "macron2022", "ensemble", "nousetlapresidence"],
        words: &["europe", "réformes", "travail", "emploi", "avenir", "bilan", "progrès", "république"],
        regions: &["Paris", "Lyon", "Nantes", "Bordeaux", "Rennes"],
        bot_share: 0.08,
        offensive_rate: 0.10,
    },
    Camp {
        size: 95,
        hashtags: &["mlp2022", "marinepresidente", "onarrive", "pouvoirdachat"],
        words: &["pouvoir", "achat", "peuple", "frontières", "sécurité", "nation", "carburant", "retraités"],
        regions: &["Marseille", "Lille", "Nice", "Metz", "Toulon"],
        bot_share: 0.12,
        offensive_rate: 0.25,
    },
    Camp {
        size: 80,
        hashtags: &["melenchonvagagner", "melenchonsecondtour", "jevotemelenchon", "unionpopulaire"],
        words: &["écologie", "retraite", "soixante", "partage", "planification", "salaires", "jeunesse", "blocage"],
        regions: &["Paris", "Toulouse", "Montpellier", "Grenoble", "Lille"],
        bot_share: 0.10,
        offensive_rate: 0.28,
    },
    Camp {
        size: 65,
        hashtags: &["zemmourprésident", "reconquete", "zemmour2022", "villepinte"],
        words: &["identité", "civilisation", "immigration", "remigration", "histoire", "reconquête", "racines", "déclin"],
        regions: &["Nice", "Paris", "Toulon", "Lyon", "Versailles"],
        bot_share: 0.22,
        offensive_rate: 0.31,
    },
    Camp {
        size: 50,
        hashtags: &["vpecresse", "pecresse2022", "lesrepublicains", "lafrancequiose"],
        words: &["droite", "dette", "ordre", "famille", "autorité", "économies", "régions", "mérite"],
        regions: &["Paris", "Versailles", "Rouen", "Caen", "Orleans"],
        bot_share: 0.20,
        offensive_rate: 0.13,
    },
];

const FRINGE_USERS: usize = 120;
const INFLUENCERS_PER_CAMP: usize = 10;

const KEYWORD_PHRASES: [&str; 8] = [
    "présidentielle",
    "élection",
    "le second tour",
    "le premier tour",
    "notre candidat",
    "allez vote",
    "cette présidentielle",
    "élection présidentielle",
];

const COMMON_WORDS: [&str; 16] = [
    "france", "débat", "meeting", "programme", "français", "ce", "soir", "demain", "campagne", "sondage",
    "ministre", "projet", "gauche", "droite", "pays", "vraiment",
];

const OFFENSIVE_WORDS: [&str; 10] = [
    "connard", "abruti", "crétin", "imbécile", "minable", "ordure", "pourri", "racaille", "guignol", "escroc",
];

const NEUTRAL_WORDS: [&str; 20] = [
    "merci", "bravo", "soutien", "belle", "journée", "équipe", "analyse", "chiffres", "proposition", "idée",
    "réunion", "ville", "marché", "famille", "écoute", "emploi", "école", "santé", "culture", "sport",
];

const LOCATION_NOISE: [&str; 6] = ["", "France", "Terre", "quelque part", "Bruxelles", "Montréal"];

const NAME_SYLLABLES: [&str; 16] = [
    "ma", "ri", "lou", "pa", "to", "ne", "ju", "li", "an", "ce", "be", "no", "el", "sa", "vi", "re",
];

#[derive(Debug, Clone)]
struct Profile {
    user_id: u64,
    screen_name: String,
    description: String,
    location: String,
    created_at: DateTime<Utc>,
    statuses_count: u64,
    followers_count: u64,
    friends_count: u64,
    favourites_count: u64,
    listed_count: u64,
    default_profile: bool,
    verified: bool,
    geo_enabled: bool,
    bot: bool,
}

fn date(y: i32, m: u32, d: u32) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(y, m, d, 0, 0, 0).single().expect("valid date")
}

fn between(rng: &mut ChaCha8Rng, a: DateTime<Utc>, b: DateTime<Utc>) -> DateTime<Utc> {
    a + Duration::seconds(rng.random_range(0..(b - a).num_seconds()))
}

fn words(rng: &mut ChaCha8Rng, pool: &[&str], n: usize) -> Vec<String> {
    (0..n).map(|_| pool.choose(rng).expect("non-empty pool").to_string()).collect()
}

fn screen_name(rng: &mut ChaCha8Rng, digits: usize) -> String {
    let n = rng.random_range(2..5);
    let mut s: String = words(rng, &NAME_SYLLABLES, n).concat();
    for _ in 0..digits {
        s.push(char::from(b'0' + rng.random_range(0..10u8)));
    }
    s
}

fn profile(rng: &mut ChaCha8Rng, user_id: u64, bot: bool, location: String) -> Profile {
    if bot {
        let n_desc = rng.random_range(0..4);
        Profile {
            user_id,
            screen_name: {
                let d = rng.random_range(5..9);
                screen_name(rng, d)
            },
            description: words(rng, &COMMON_WORDS, n_desc).join(" "),
            location,
            created_at: between(rng, date(2021, 6, 1), date(2022, 3, 1)),
            statuses_count: rng.random_range(4_000..60_000),
            followers_count: rng.random_range(0..300),
            friends_count: rng.random_range(400..5_000),
            favourites_count: rng.random_range(0..800),
            listed_count: rng.random_range(0..3),
            default_profile: rng.random_bool(0.7),
            verified: false,
            geo_enabled: rng.random_bool(0.05),
            bot,
        }
    } else {
        let digits = if rng.random_bool(0.2) { 2 } else { 0 };
        let n_desc = rng.random_range(3..20);
        Profile {
            user_id,
            screen_name: screen_name(rng, digits),
            description: words(rng, &NEUTRAL_WORDS, n_desc).join(" "),
            location,
            created_at: between(rng, date(2009, 1, 1), date(2021, 9, 1)),
            statuses_count: rng.random_range(100..25_000),
            followers_count: rng.random_range(10..6_000),
            friends_count: rng.random_range(30..2_000),
            favourites_count: rng.random_range(100..40_000),
            listed_count: rng.random_range(0..60),
            default_profile: rng.random_bool(0.1),
            verified: rng.random_bool(0.02),
            geo_enabled: rng.random_bool(0.3),
            bot,
        }
    }
}

fn profile_json(p: &Profile) -> Value {
    json!({
        "user_id": p.user_id,
        "screen_name": p.screen_name,
        "description": p.description,
        "location": p.location,
        "created_at": p.created_at.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        "statuses_count": p.statuses_count,
        "followers_count": p.followers_count,
        "friends_count": p.friends_count,
        "favourites_count": p.favourites_count,
        "listed_count": p.listed_count,
        "default_profile": p.default_profile,
        "verified": p.verified,
        "geo_enabled": p.geo_enabled,
    })
}

fn location(rng: &mut ChaCha8Rng, camp: Option<&Camp>) -> String {
    let r: f64 = rng.random();
    match camp {
        Some(c) if r < 0.7 => {
            let city = c.regions.choose(rng).expect("regions");
            if rng.random_bool(0.3) {
                format!("{city}, France")
            } else {
                city.to_string()
            }
        }
        _ if r < 0.85 => ["Strasbourg", "Dijon", "Brest", "Ajaccio", "Tours", "Limoges", "Reims"]
            .choose(rng)
            .expect("cities")
            .to_string(),
        _ => LOCATION_NOISE.choose(rng).expect("noise").to_string(),
    }
}

struct Original {
    tweet_id: u64,
    user_id: u64,
    screen_name: String,
    text: String,
    hashtags: Vec<String>,
}

/// Generated files, as text.
pub struct SynthCorpus {
    pub tweets_jsonl: String,
    pub users_jsonl: String,
    pub offense_train_csv: String,
    pub bot_train_csv: String,
}

fn compose(rng: &mut ChaCha8Rng, camp: &Camp, mention: Option<&str>) -> (String, Vec<String>) {
    let mut parts: Vec<String> = Vec::new();
    if rng.random_bool(0.92) {
        parts.push(KEYWORD_PHRASES.choose(rng).expect("phrases").to_string());
    }
    let n = rng.random_range(3..7);
    parts.extend(words(rng, camp.words, n));
    let n = rng.random_range(0..3);
    parts.extend(words(rng, &COMMON_WORDS, n));
    if rng.random_bool(camp.offensive_rate) {
        let at = rng.random_range(0..=parts.len());
        parts.insert(at, OFFENSIVE_WORDS.choose(rng).expect("words").to_string());
    }
    if let Some(m) = mention {
        parts.push(format!("@{m}"));
    }
    if rng.random_bool(0.2) {
        parts.push(format!("https://t.co/{:08x}", rng.random::<u32>()));
    }
    let mut tags: Vec<String> = Vec::new();
    for _ in 0..rng.random_range(1..4) {
        let t = camp.hashtags.choose(rng).expect("hashtags").to_string();
        if !tags.contains(&t) {
            tags.push(t);
        }
    }
    for t in &tags {
        parts.push(format!("#{t}"));
    }
    let mut text = parts.join(" ");
    if let Some(first) = text.get(..1) {
        let upper = first.to_uppercase();
        text.replace_range(..1, &upper);
    }
    (text, tags)
}

fn offense_training(rng: &mut ChaCha8Rng) -> String {
    let mut rows: Vec<(String, &str)> = Vec::new();
    let all_camp_words: Vec<&str> = CAMPS.iter().flat_map(|c| c.words.iter().copied()).collect();
    for i in 0..(821 + 1690) {
        let offensive = i >= 821;
        let (a, b, c) = (rng.random_range(2..5), rng.random_range(1..4), rng.random_range(0..3));
        let mut parts = words(rng, &NEUTRAL_WORDS, a);
        parts.extend(words(rng, &all_camp_words, b));
        parts.extend(words(rng, &COMMON_WORDS, c));
        if offensive {
            let k = rng.random_range(1..3);
            for _ in 0..k {
                let at = rng.random_range(0..=parts.len());
                parts.insert(at, OFFENSIVE_WORDS.choose(rng).expect("words").to_string());
            }
        }
        rows.push((parts.join(" "), if offensive { "offensive" } else { "normal" }));
    }
    rows.shuffle(rng);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["text", "label"]).expect("in-memory csv");
    for (text, label) in rows {
        w.write_record([text.as_str(), label]).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

fn bot_training(rng: &mut ChaCha8Rng) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "user_id",
        "screen_name",
        "description",
        "location",
        "created_at",
        "statuses_count",
        "followers_count",
        "friends_count",
        "favourites_count",
        "listed_count",
        "default_profile",
        "verified",
        "geo_enabled",
        "label",
    ])
    .expect("in-memory csv");
    for i in 0..600u64 {
        let bot = rng.random_bool(0.4);
        let loc = location(rng, None);
        let mut p = profile(rng, 9_000_000 + i, bot, loc);
        // label noise keeps the task from being trivially separable
        if rng.random_bool(0.02) {
            p.bot = !p.bot;
        }
        w.write_record([
            p.user_id.to_string(),
            p.screen_name,
            p.description,
            p.location,
            p.created_at.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            p.statuses_count.to_string(),
            p.followers_count.to_string(),
            p.friends_count.to_string(),
            p.favourites_count.to_string(),
            p.listed_count.to_string(),
            p.default_profile.to_string(),
            p.verified.to_string(),
            p.geo_enabled.to_string(),
            if p.bot { "bot" } else { "human" }.to_string(),
        ])
        .expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

pub fn generate(seed: u64) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // users: camp members first, then the fringe
    let mut profiles: Vec<Profile> = Vec::new();
    let mut camp_of: Vec<Option<usize>> = Vec::new();
    let mut influencer: Vec<bool> = Vec::new();
    let mut next_id = 1_000_000u64;
    for (ci, camp) in CAMPS.iter().enumerate() {
        for j in 0..camp.size {
            next_id += rng.random_range(1..5_000);
            // the first few members of a camp are its widely retweeted accounts
            let lead = j < INFLUENCERS_PER_CAMP;
            influencer.push(lead);
            let bot = !lead && rng.random_bool(camp.bot_share);
            let loc = location(&mut rng, Some(camp));
            profiles.push(profile(&mut rng, next_id, bot, loc));
            camp_of.push(Some(ci));
        }
    }
    for _ in 0..FRINGE_USERS {
        next_id += rng.random_range(1..5_000);
        let bot = rng.random_bool(0.1);
        let loc = location(&mut rng, None);
        profiles.push(profile(&mut rng, next_id, bot, loc));
        camp_of.push(None);
        influencer.push(false);
    }
    let members: Vec<Vec<usize>> = (0..CAMPS.len())
        .map(|c| (0..profiles.len()).filter(|&u| camp_of[u] == Some(c)).collect())
        .collect();
    // posting weight: leads and bots are more active
    let weights: Vec<f64> = (0..profiles.len())
        .map(|u| match (camp_of[u], influencer[u], profiles[u].bot) {
            (None, _, _) => 0.3,
            (_, true, _) => 3.0,
            (_, _, true) => 2.0,
            _ => 1.0,
        })
        .collect();
    let total_weight: f64 = weights.iter().sum();

    let mut originals: Vec<Vec<Original>> = (0..CAMPS.len()).map(|_| Vec::new()).collect();
    let mut lead_posts: Vec<Vec<usize>> = vec![Vec::new(); CAMPS.len()];
    let mut lines: Vec<String> = Vec::with_capacity(N_TWEETS + 8);
    let start = date(2022, 3, 1);
    let mut tweet_id = 1_498_000_000_000_000_000u64;

    for i in 0..N_TWEETS {
        let mut r = rng.random::<f64>() * total_weight;
        let mut author = 0;
        for (u, w) in weights.iter().enumerate() {
            if r < *w {
                author = u;
                break;
            }
            r -= w;
        }
        let p = &profiles[author];
        tweet_id += rng.random_range(1_000..1_000_000);
        let created_at = start + Duration::seconds(i as i64 * 470 + rng.random_range(0..400));
        let home = camp_of[author].unwrap_or_else(|| rng.random_range(0..CAMPS.len()));
        // fringe users and the occasional partisan retweet across camps
        let source_camp = if camp_of[author].is_some() && rng.random_bool(0.95) {
            home
        } else {
            rng.random_range(0..CAMPS.len())
        };
        let retweet_p = match (influencer[author], p.bot) {
            (true, _) => 0.1,
            (_, true) => 0.9,
            _ => 0.75,
        };
        let lang = if rng.random_bool(0.03) { "en" } else { "fr" };

        let target = if rng.random_bool(retweet_p) && !originals[source_camp].is_empty() {
            let pool = &originals[source_camp];
            let leads = &lead_posts[source_camp];
            // mostly the camp's leads get retweeted, recent tweets more often
            let pick = |rng: &mut ChaCha8Rng, n: usize| {
                let back = (rng.random::<f64>().powi(2) * n as f64) as usize;
                n - 1 - back.min(n - 1)
            };
            let idx = if !leads.is_empty() && rng.random_bool(0.8) {
                leads[pick(&mut rng, leads.len())]
            } else {
                pick(&mut rng, pool.len())
            };
            Some(idx).filter(|&i| pool[i].user_id != p.user_id)
        } else {
            None
        };
        let record = match target {
            Some(idx) => {
                let o = &originals[source_camp][idx];
                json!({
                    "tweet_id": tweet_id,
                    "user_id": p.user_id,
                    "text": format!("RT @{}: {}", o.screen_name, o.text),
                    "created_at": created_at.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                    "hashtags": o.hashtags,
                    "retweeted_user_id": o.user_id,
                    "retweeted_status_id": o.tweet_id,
                    "lang": lang,
                })
            }
            None => {
                if influencer[author] && camp_of[author] == Some(home) {
                    lead_posts[home].push(originals[home].len());
                }
                post_original(&mut rng, &mut originals, home, p, tweet_id, created_at, &members, &profiles, lang)
            }
        };
        lines.push(record.to_string());
        if i % 2_000 == 1_999 {
            // a few broken lines, as a real export would contain
            lines.push(format!("{{\"tweet_id\": {}, \"text\": ", tweet_id + 1));
        }
    }

    let mut tweets_jsonl = String::new();
    for l in &lines {
        let _ = writeln!(tweets_jsonl, "{l}");
    }

    let mut users_jsonl = String::new();
    for (i, p) in profiles.iter().enumerate() {
        let mut v = profile_json(p);
        if i % 97 == 13 {
            // sparse exports omit metadata
            let obj = v.as_object_mut().expect("object");
            obj.remove("listed_count");
            obj.remove("geo_enabled");
        }
        let _ = writeln!(users_jsonl, "{v}");
    }

    SynthCorpus {
        tweets_jsonl,
        users_jsonl,
        offense_train_csv: offense_training(&mut rng),
        bot_train_csv: bot_training(&mut rng),
    }
}

#[allow(clippy::too_many_arguments)]
fn post_original(
    rng: &mut ChaCha8Rng,
    originals: &mut [Vec<Original>],
    camp: usize,
    author: &Profile,
    tweet_id: u64,
    created_at: DateTime<Utc>,
    members: &[Vec<usize>],
    profiles: &[Profile],
    lang: &str,
) -> Value {
    let mention = if rng.random_bool(0.15) {
        members[camp].choose(rng).map(|&u| profiles[u].screen_name.clone())
    } else {
        None
    };
    let pool = &originals[camp];
    let (text, tags) = if !pool.is_empty() && rng.random_bool(0.04) {
        // copy-pasted text, sometimes with different spacing
        let o = &pool[rng.random_range(0..pool.len())];
        let text = if rng.random_bool(0.5) { o.text.replace(' ', "  ") } else { o.text.clone() };
        (text, o.hashtags.clone())
    } else {
        compose(rng, &CAMPS[camp], mention.as_deref())
    };
    originals[camp].push(Original {
        tweet_id,
        user_id: author.user_id,
        screen_name: author.screen_name.clone(),
        text: text.clone(),
        hashtags: tags.clone(),
    });
    json!({
        "tweet_id": tweet_id,
        "user_id": author.user_id,
        "text": text,
        "created_at": created_at.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        "hashtags": tags,
        "lang": lang,
    })
}

pub const KEYWORDS: &str = include_str!("../../../data/keywords.txt");

/// Writes the corpus, both training sets and the keyword list into `dir`.
pub fn write_corpus(dir: &Path, seed: u64) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let c = generate(seed);
    let files = [
        ("tweets.jsonl", c.tweets_jsonl),
        ("users.jsonl", c.users_jsonl),
        ("offense_train.csv", c.offense_train_csv),
        ("bot_train.csv", c.bot_train_csv),
        ("keywords.txt", KEYWORDS.to_string()),
    ];
    for (name, text) in files {
        let p = dir.join(name);
        fs::write(&p, text).map_err(|e| CliError::io(&p, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = generate(5);
        let b = generate(5);
        assert_eq!(a.tweets_jsonl, b.tweets_jsonl);
        assert_eq!(a.bot_train_csv, b.bot_train_csv);
        assert_ne!(a.tweets_jsonl, generate(6).tweets_jsonl);
    }

    #[test]
    fn shape() {
        let c = generate(DEFAULT_SEED);
        let good = c
            .tweets_jsonl
            .lines()
            .filter(|l| tweetnet_core::ingest::parse_tweet_line(l).is_ok())
            .count();
        assert_eq!(good, N_TWEETS);
        assert_eq!(c.offense_train_csv.lines().filter(|l| l.ends_with(",normal")).count(), 821);
        assert_eq!(c.offense_train_csv.lines().filter(|l| l.ends_with(",offensive")).count(), 1690);
    }
}
