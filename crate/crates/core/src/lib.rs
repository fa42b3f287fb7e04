//! Workload-driven horizontal fragmentation of XML data warehouses.
//!
//! Selection predicates are extracted from a query workload, encoded as a
//! query-predicate incidence matrix and clustered with K-means. Each cluster
//! becomes one horizontal fragment (dimension fragments plus derived fact
//! fragments), and an `ELSE` fragment collects every fact no cluster covers,
//! so `K` clusters yield exactly `K + 1` fragments.
//!
//! Two classical derived fragmentation methods, predicate construction
//! (minterms) and affinity grouping, are implemented alongside for comparison,
//! together with a deterministic cost model that simulates parallel fragment
//! evaluation.
//!
//! The clustering math is generic over [`Scalar`]; the aliases below fix the
//! scalar for the common cases.

pub mod baselines;
pub mod bench;
pub mod cli;
pub mod clustering;
pub mod error;
pub mod fragmenter;
pub mod scalar;
pub mod warehouse;
pub mod workload;

#[cfg(test)]
mod testutil;
mod xml;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};

/// Clustering result over `f64` centroids, the default for the pipeline.
pub type ClusterSet = clustering::ClusterSet<f64>;
/// Clustering result with single-precision centroids.
pub type ClusterSetF32 = clustering::ClusterSet<f32>;
/// Clustering result computed in exact rational arithmetic.
pub type ExactClusterSet = clustering::ClusterSet<Rational>;
/// A single cluster with `f64` centroid.
pub type Cluster = clustering::Cluster<f64>;
