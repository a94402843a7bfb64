//! Domain types and their line/XML formats.

mod grade;
mod manifest;
mod qrels;
mod run;
mod stats;
mod topic;

pub use grade::Grade;
pub use manifest::{parse_manifest, write_manifest, CrawlSource, DanglingRef, DocRecord, Manifest, ManifestEntry};
pub use qrels::{parse_qrels, write_qrels, Judgments, Qrels};
pub use run::{parse_run, parse_run_with_warnings, write_run, RankedDoc, RankedRun};
pub use stats::{collection_stats, CollectionStats, Summary};
pub use topic::{is_valid_topic_id, parse_topics, write_topics, Topic};
