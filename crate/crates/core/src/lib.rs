//! Building and auditing small test collections for retrieval evaluation.
//!
//! The crate covers the whole loop: parse topics, runs and judgments; build
//! size-k judging pools from pooling-system runs; score systems with NDCG,
//! AP, P@k, RR, R@k and C@k; audit judgments with noise documents; and
//! measure how sensitive scores are to pool incompleteness.
//!
//! Scores are generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix them to `f64`.

pub mod audit;
mod error;
pub mod html;
pub mod measures;
pub mod model;
pub mod pooling;
pub mod reliability;
pub mod scalar;
pub mod synthetic;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use audit::{noise_audit, AuditReport};
pub use measures::{evaluate, leaderboard, EvalOptions, Measure};
pub use model::{Grade, Manifest, Qrels, RankedRun, Topic};
pub use pooling::{build_pool, overlap_report, Pool, PoolConfig, PoolingInput};
pub use reliability::{increment_analysis, ReliabilityConfig};

/// Default score type.
pub type Score = f64;
pub type EvalResult = measures::EvalResult<Score>;
pub type MeasureResult = measures::MeasureResult<Score>;
pub type TopicScore = measures::TopicScore<Score>;
pub type IncrementTable = reliability::IncrementTable<Score>;
pub type IncrementRow = reliability::IncrementRow<Score>;

/// Single-precision variants.
pub type EvalResult32 = measures::EvalResult<f32>;
pub type IncrementTable32 = reliability::IncrementTable<f32>;
