//! Judging service: serves cleaned pool documents to assessors, records
//! their grades in an append-only log, and exports per-assessor qrels.

pub mod clean;
pub mod config;
mod error;
pub mod log;
pub mod service;

pub use clean::{clean_document, CleanedDocument};
pub use config::{Assessor, Assignments, ServiceConfig};
pub use error::{JudgeError, Result};
pub use log::{export_qrels, read_log, JudgmentEvent};
pub use service::{router, serve, JudgeState};
