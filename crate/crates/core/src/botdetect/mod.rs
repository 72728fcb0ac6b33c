//! Metadata-based bot detection.
//!
//! Seventeen features are derived from each account's profile (raw counts,
//! flags, account age, per-day growth rates and name/description lengths), a
//! random forest is trained on labeled accounts, and community members are
//! labeled bots when the forest probability reaches the threshold (0.75 by
//! default).

mod dataset;
mod eval;
mod features;
mod forest;
mod model_io;
mod report;

pub use dataset::{synthetic_blobs, Dataset, BLOB_SEPARATION};
pub use eval::{
    cross_validate, cross_validate_with, f1_score, feature_label_correlation, pearson, stratified_folds, Correlation,
    CvResult,
};
pub use features::{
    default_collection_date, extract_features, user_age_days, BotFeatureVector, FEATURE_NAMES, N_FEATURES,
};
pub use forest::{
    classify_probability, train_forest, BotForest, Classification, DecisionTree, FeatureImportance, ForestParams,
    TreeNode, DEFAULT_BOT_THRESHOLD, DEFAULT_N_TREES,
};
pub use model_io::{decode_forest, encode_forest, read_forest, write_forest, MODEL_MAGIC, MODEL_VERSION};
pub use report::{
    bot_report, ratio3, write_bot_csv, write_correlation_csv, write_importance_csv, BotReport, BotRow,
};
