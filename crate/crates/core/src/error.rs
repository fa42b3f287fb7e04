use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::workload::PredicateId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },

    #[error("failed to write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },

    #[error("{}:{line}:{column}: {message}", file.display())]
    Document {
        file: PathBuf,
        line: u32,
        column: u32,
        message: String,
    },

    #[error("invalid warehouse metadata: {0}")]
    Metadata(String),

    #[error("referential integrity violated: {message} (facts: {})", fact_ids.join(", "))]
    Integrity {
        message: String,
        fact_ids: Vec<String>,
    },

    #[error("workload query {query}: syntax error: {message} near `{clause}`")]
    WorkloadSyntax {
        query: usize,
        clause: String,
        message: String,
    },

    #[error("workload query {query}: {message}")]
    WorkloadSemantic { query: usize, message: String },

    #[error("clustering: {0}")]
    Clustering(String),

    #[error(
        "predicate construction refused: {count} predicates exceed the cap of {cap} \
         (up to 2^{count} minterms)"
    )]
    PcCapExceeded { count: usize, cap: usize },

    #[error("unknown predicate {0}")]
    UnknownPredicate(PredicateId),

    #[error("invalid fragmentation schema: {0}")]
    Schema(String),

    #[error("report serialization: {0}")]
    Report(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
