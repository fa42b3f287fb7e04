use std::collections::BTreeSet;

use super::{PredicateId, QueryId, WorkloadQuery};
use crate::scalar::Scalar;

/// Binary query x predicate incidence matrix. Rows are ordered by query id,
/// columns by predicate id; cell `(i, j)` is set iff predicate `j` appears in
/// query `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryPredicateMatrix {
    queries: Vec<QueryId>,
    predicates: Vec<PredicateId>,
    cells: Vec<Vec<bool>>,
}

/// Builds the matrix from query selections. Every predicate that occurs in
/// some query becomes a column; selection-free queries produce zero rows.
pub fn build_qp_matrix(queries: &[WorkloadQuery]) -> QueryPredicateMatrix {
    let mut sorted: Vec<&WorkloadQuery> = queries.iter().collect();
    sorted.sort_by_key(|q| q.id);
    let predicates: Vec<PredicateId> = sorted
        .iter()
        .flat_map(|q| q.selections.iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let cells = sorted
        .iter()
        .map(|q| {
            predicates
                .iter()
                .map(|p| q.selections.contains(p))
                .collect()
        })
        .collect();
    QueryPredicateMatrix {
        queries: sorted.iter().map(|q| q.id).collect(),
        predicates,
        cells,
    }
}

impl QueryPredicateMatrix {
    /// Builds a matrix from explicit rows. Panics if a row's width differs
    /// from the number of predicates.
    pub fn from_rows(
        queries: Vec<QueryId>,
        predicates: Vec<PredicateId>,
        rows: Vec<Vec<bool>>,
    ) -> Self {
        assert_eq!(queries.len(), rows.len(), "one row per query");
        assert!(
            rows.iter().all(|r| r.len() == predicates.len()),
            "ragged rows"
        );
        QueryPredicateMatrix {
            queries,
            predicates,
            cells: rows,
        }
    }

    pub fn queries(&self) -> &[QueryId] {
        &self.queries
    }

    pub fn predicates(&self) -> &[PredicateId] {
        &self.predicates
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.cells
    }

    pub fn cell(&self, query: usize, predicate: usize) -> bool {
        self.cells[query][predicate]
    }

    pub fn predicate_index(&self, id: PredicateId) -> Option<usize> {
        self.predicates.binary_search(&id).ok()
    }

    /// Column `j` as a vector over the queries.
    pub fn column<T: Scalar>(&self, j: usize) -> Vec<T> {
        self.cells
            .iter()
            .map(|row| if row[j] { T::one() } else { T::zero() })
            .collect()
    }

    /// All columns, in predicate order.
    pub fn columns<T: Scalar>(&self) -> Vec<Vec<T>> {
        (0..self.predicates.len()).map(|j| self.column(j)).collect()
    }

    /// Queries containing predicate `j`.
    pub fn queries_with(&self, j: usize) -> BTreeSet<QueryId> {
        self.queries
            .iter()
            .zip(&self.cells)
            .filter(|(_, row)| row[j])
            .map(|(q, _)| *q)
            .collect()
    }

    /// Fraction of set cells; 0 for an empty matrix.
    pub fn density(&self) -> f64 {
        let total = self.queries.len() * self.predicates.len();
        if total == 0 {
            return 0.0;
        }
        let ones = self.cells.iter().flatten().filter(|&&c| c).count();
        ones as f64 / total as f64
    }
}
