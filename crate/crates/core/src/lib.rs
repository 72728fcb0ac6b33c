//! Retweet-graph community mining.
//!
//! The pipeline reads tweet and user records ([`ingest`]), builds the
//! weighted retweet graph ([`graph`]), extracts a dense k-core and splits it
//! into Louvain communities ([`partition`]), then profiles each community:
//! hashtag, n-gram and regional statistics ([`analytics`]), offensive-tweet
//! tallies ([`offense`]) and metadata-based bot detection ([`botdetect`]).
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`.

pub mod analytics;
pub mod botdetect;
pub(crate) mod csvio;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod offense;
pub mod partition;
pub mod reference;
pub mod scalar;

pub use error::{Error, KDiagnostic, Result};
pub use graph::{build_retweet_graph, RetweetGraph};
pub use ingest::{TweetRecord, UserProfile};
pub use scalar::Scalar;

pub type Partition = partition::Partition<f64>;
pub type PartitionF32 = partition::Partition<f32>;
pub type KSelection = partition::KSelection<f64>;
pub type BotForest = botdetect::BotForest<f64>;
pub type BotForestF32 = botdetect::BotForest<f32>;
pub type BotFeatureVector = botdetect::BotFeatureVector<f64>;
pub type Dataset = botdetect::Dataset<f64>;
