use std::collections::BTreeMap;

use crate::workload::{PredicateId, QueryId, QueryPredicateMatrix};

/// Pairwise predicate affinity: the summed frequency of the queries using
/// both predicates. The diagonal holds each predicate's total usage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinityMatrix {
    pub predicates: Vec<PredicateId>,
    pub cells: Vec<Vec<u64>>,
}

impl AffinityMatrix {
    /// Queries absent from `frequencies` count once.
    pub fn build(matrix: &QueryPredicateMatrix, frequencies: &BTreeMap<QueryId, u32>) -> Self {
        let n = matrix.predicates().len();
        let mut cells = vec![vec![0u64; n]; n];
        for (q, row) in matrix.queries().iter().zip(matrix.rows()) {
            let f = u64::from(frequencies.get(q).copied().unwrap_or(1));
            let used: Vec<usize> = (0..n).filter(|&j| row[j]).collect();
            for &i in &used {
                for &j in &used {
                    cells[i][j] += f;
                }
            }
        }
        AffinityMatrix {
            predicates: matrix.predicates().to_vec(),
            cells,
        }
    }

    pub fn affinity(&self, i: usize, j: usize) -> u64 {
        self.cells[i][j]
    }
}

/// Connected components of the graph linking predicate pairs whose affinity
/// reaches `threshold`. Groups are ordered by their smallest member and
/// members by id; unlinked predicates form singleton groups.
pub fn ab_fragments(
    matrix: &QueryPredicateMatrix,
    frequencies: &BTreeMap<QueryId, u32>,
    threshold: u64,
) -> Vec<Vec<PredicateId>> {
    let aff = AffinityMatrix::build(matrix, frequencies);
    let n = aff.predicates.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if aff.affinity(i, j) >= threshold {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<PredicateId>> = BTreeMap::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        groups.entry(r).or_default().push(aff.predicates[i]);
    }
    let mut groups: Vec<Vec<PredicateId>> = groups.into_values().collect();
    for g in &mut groups {
        g.sort();
    }
    groups.sort();
    groups
}
