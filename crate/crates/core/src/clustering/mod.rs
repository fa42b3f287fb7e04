//! Predicate clustering.
//!
//! Each predicate is a point: its column of the query-predicate matrix. The
//! objective is the total intra-cluster variance
//! `sum_i sum_{x in C_i} |x - mu_i|^2` with `mu_i` the mean of cluster `C_i`.
//! [`kmeans`] is the production path; [`exhaustive_best_partition`] computes
//! the global optimum for small instances and serves as its test oracle.

mod exhaustive;
mod kmeans;

use crate::error::{Error, Result};
use crate::scalar::{mean, squared_distance, Scalar};
use crate::workload::{PredicateId, QueryPredicateMatrix};

pub use exhaustive::{exhaustive_best_partition, EXHAUSTIVE_LIMIT};
pub use kmeans::{kmeans, Initialization, KMeansOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct Cluster<T> {
    pub centroid: Vec<T>,
    /// Members in predicate id order.
    pub members: Vec<PredicateId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterSet<T> {
    pub k_requested: usize,
    /// Nonempty clusters, ordered by their smallest member.
    pub clusters: Vec<Cluster<T>>,
    pub iterations: usize,
    pub total_variance: T,
    /// Objective after each update step; empty for the exhaustive oracle.
    pub variance_trace: Vec<T>,
}

impl<T: Scalar> ClusterSet<T> {
    /// Member lists, one per cluster.
    pub fn groups(&self) -> Vec<Vec<PredicateId>> {
        self.clusters.iter().map(|c| c.members.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn cluster_of(&self, p: PredicateId) -> Option<usize> {
        self.clusters.iter().position(|c| c.members.contains(&p))
    }

    /// Builds a cluster set from point assignments, computing centroids and
    /// the objective from the members.
    pub(crate) fn from_assignment(
        matrix: &QueryPredicateMatrix,
        points: &[Vec<T>],
        assignment: &[usize],
        k_requested: usize,
        iterations: usize,
        variance_trace: Vec<T>,
    ) -> Self {
        let n_clusters = assignment.iter().copied().max().map_or(0, |m| m + 1);
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_clusters];
        for (p, &c) in assignment.iter().enumerate() {
            members[c].push(p);
        }
        members.retain(|m| !m.is_empty());
        members.sort_by_key(|m| m[0]);

        let dim = matrix.queries().len();
        let mut total = T::zero();
        let clusters = members
            .into_iter()
            .map(|idx| {
                let centroid = mean(idx.iter().map(|&i| points[i].as_slice()), dim);
                for &i in &idx {
                    total = total + squared_distance(&points[i], &centroid);
                }
                Cluster {
                    centroid,
                    members: idx.iter().map(|&i| matrix.predicates()[i]).collect(),
                }
            })
            .collect();
        ClusterSet {
            k_requested,
            clusters,
            iterations,
            total_variance: total,
            variance_trace,
        }
    }
}

/// Recomputes the objective of `cs` on `matrix` from cluster membership
/// alone; stored centroids are ignored.
pub fn intra_cluster_variance<T: Scalar>(
    cs: &ClusterSet<T>,
    matrix: &QueryPredicateMatrix,
) -> Result<T> {
    let dim = matrix.queries().len();
    let mut total = T::zero();
    for cluster in &cs.clusters {
        let mut points = Vec::with_capacity(cluster.members.len());
        for &p in &cluster.members {
            let j = matrix.predicate_index(p).ok_or_else(|| {
                Error::Clustering(format!("cluster member {p} is not a matrix predicate"))
            })?;
            points.push(matrix.column::<T>(j));
        }
        if points.is_empty() {
            continue;
        }
        let centroid = mean(points.iter().map(Vec::as_slice), dim);
        for x in &points {
            total = total + squared_distance(x, &centroid);
        }
    }
    Ok(total)
}
