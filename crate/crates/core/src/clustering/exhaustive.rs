use super::ClusterSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::workload::QueryPredicateMatrix;

/// Largest instance the exhaustive search accepts.
pub const EXHAUSTIVE_LIMIT: usize = 12;

/// Globally variance-minimal partition of the predicates into at most `k`
/// clusters, by branch and bound over set partitions.
///
/// Points are placed one at a time into an existing block or a new one.
/// Placing `x` into a block with `n` members and coordinate sum `S` raises
/// that block's squared error by `n / (n + 1) * |x - S / n|^2`, so the
/// partial objective only grows and prunes any branch that already matches
/// the best complete partition.
pub fn exhaustive_best_partition<T: Scalar>(
    matrix: &QueryPredicateMatrix,
    k: usize,
) -> Result<ClusterSet<T>> {
    let n = matrix.predicates().len();
    if k == 0 {
        return Err(Error::Clustering("k must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::Clustering("no predicates to cluster".into()));
    }
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::Clustering(format!(
            "exhaustive search supports at most {EXHAUSTIVE_LIMIT} predicates, got {n}"
        )));
    }
    let points: Vec<Vec<T>> = matrix.columns();
    let mut search = Search {
        points: &points,
        k,
        blocks: Vec::new(),
        assignment: vec![0; n],
        best: None,
    };
    search.place(0, T::zero());
    let (_, assignment) = search.best.expect("at least one partition exists");
    Ok(ClusterSet::from_assignment(
        matrix,
        &points,
        &assignment,
        k,
        0,
        Vec::new(),
    ))
}

struct Block<T> {
    sum: Vec<T>,
    count: usize,
}

struct Search<'a, T> {
    points: &'a [Vec<T>],
    k: usize,
    blocks: Vec<Block<T>>,
    assignment: Vec<usize>,
    best: Option<(T, Vec<usize>)>,
}

impl<T: Scalar> Search<'_, T> {
    fn place(&mut self, i: usize, cost: T) {
        if let Some((best, _)) = &self.best {
            if cost >= *best {
                return;
            }
        }
        if i == self.points.len() {
            self.best = Some((cost, self.assignment.clone()));
            return;
        }
        let x = &self.points[i];
        for b in 0..self.blocks.len() {
            let block = &self.blocks[b];
            let n = T::from_count(block.count);
            let mut dist = T::zero();
            for (s, &xv) in block.sum.iter().zip(x) {
                let d = xv - *s / n;
                dist = dist + d * d;
            }
            let added = n / (n + T::one()) * dist;

            let block = &mut self.blocks[b];
            for (s, &xv) in block.sum.iter_mut().zip(x) {
                *s = *s + xv;
            }
            block.count += 1;
            self.assignment[i] = b;
            self.place(i + 1, cost + added);
            let block = &mut self.blocks[b];
            for (s, &xv) in block.sum.iter_mut().zip(x) {
                *s = *s - xv;
            }
            block.count -= 1;
        }
        if self.blocks.len() < self.k {
            self.blocks.push(Block {
                sum: x.clone(),
                count: 1,
            });
            self.assignment[i] = self.blocks.len() - 1;
            self.place(i + 1, cost);
            self.blocks.pop();
        }
    }
}
