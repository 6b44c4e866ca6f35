//! Semantic Brand Score engine.
//!
//! Turns labeled short-text corpora into per-group word co-occurrence
//! networks and scores configured concept clusters by prevalence, diversity
//! (distinctiveness centrality) and connectivity (weighted betweenness).
//!
//! The stages are exposed individually so they can be tested and reused:
//!
//! - [`corpus`]: loading, query filtering, spam flagging, group partitioning
//! - [`textprep`]: tokenization, stopwords, n-gram merging, stemming
//! - [`graph`]: co-occurrence graph construction, pruning, cluster merging
//! - [`metrics`]: the three score components plus brute-force oracles
//! - [`scoring`]: standardization, SBS composition, relative shares, ranking
//! - [`sentiment`]: pluggable document scoring and per-orientation summaries
//! - [`pipeline`]: the end-to-end run, artifacts and the Table-3 validator
//! - [`report`]: table rendering in CSV, JSON and Markdown
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default). Every parallel reduction is arranged so the output is
//! bit-identical to the sequential path.

pub mod corpus;
pub mod error;
pub mod exec;
pub mod graph;
pub mod metrics;
pub mod pipeline;
pub mod report;
pub mod scoring;
pub mod sentiment;
pub mod textprep;

pub use error::{Error, Result};
pub use exec::Execution;
