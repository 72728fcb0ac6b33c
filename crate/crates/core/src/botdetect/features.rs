use chrono::{DateTime, Duration, Utc};

use crate::error::{Error, Result};
use crate::ingest::{TweetRecord, UserProfile};
use crate::scalar::Scalar;

pub const N_FEATURES: usize = 17;

/// Column order of every feature vector, CSV file and model.
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "statuses_count",
    "followers_count",
    "friends_count",
    "favourites_count",
    "listed_count",
    "default_profile",
    "verified",
    "geo_enabled",
    "user_age_days",
    "tweet_frequency",
    "followers_growth",
    "friends_growth",
    "favourites_growth",
    "listed_growth",
    "screen_name_length",
    "screen_name_digits",
    "description_length",
];

pub type BotFeatureVector<F> = [F; N_FEATURES];

const MILLIS_PER_DAY: f64 = 86_400_000.0;

/// Account age in days at `collection_date`, floored at one day.
pub fn user_age_days(created_at: DateTime<Utc>, collection_date: DateTime<Utc>) -> Result<f64> {
    if created_at > collection_date {
        return Err(Error::Data(format!(
            "account created at {created_at} after collection date {collection_date}"
        )));
    }
    let days = (collection_date - created_at).num_milliseconds() as f64 / MILLIS_PER_DAY;
    Ok(days.max(1.0))
}

pub fn extract_features<F: Scalar>(p: &UserProfile, collection_date: DateTime<Utc>) -> Result<BotFeatureVector<F>> {
    let age = user_age_days(p.created_at, collection_date)?;
    let per_day = |count: u64| count as f64 / age;
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    let raw: [f64; N_FEATURES] = [
        p.statuses_count as f64,
        p.followers_count as f64,
        p.friends_count as f64,
        p.favourites_count as f64,
        p.listed_count as f64,
        flag(p.default_profile),
        flag(p.verified),
        flag(p.geo_enabled),
        age,
        per_day(p.statuses_count),
        per_day(p.followers_count),
        per_day(p.friends_count),
        per_day(p.favourites_count),
        per_day(p.listed_count),
        p.screen_name.chars().count() as f64,
        p.screen_name.chars().filter(char::is_ascii_digit).count() as f64,
        p.description.chars().count() as f64,
    ];
    Ok(raw.map(F::of_f64))
}

/// Latest timestamp among profiles and tweets plus one day; `None` for an empty corpus.
pub fn default_collection_date(profiles: &[UserProfile], tweets: &[TweetRecord]) -> Option<DateTime<Utc>> {
    profiles
        .iter()
        .map(|p| p.created_at)
        .chain(tweets.iter().map(|t| t.created_at))
        .max()
        .map(|d| d + Duration::days(1))
}
