//! File formats: feature files, score CSVs, plain-text config.

pub mod config;
pub mod features;
pub mod numfmt;
pub mod score_csv;

pub use config::parse_config;
pub use features::{parse_feature_file, FeatureFile, FeatureRow};
pub use numfmt::format_g9;
pub use score_csv::{fuse_tables, parse_score_csv, score_csv_from_folds, ScoreRow, ScoreTable};
