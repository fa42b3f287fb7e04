use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ClusterSet;
use crate::error::{Error, Result};
use crate::scalar::{mean, squared_distance, Scalar};
use crate::workload::QueryPredicateMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Initialization {
    /// Repeatedly the column farthest from all chosen centroids, ties to the
    /// lower predicate id. Run once per distinct starting column, beginning
    /// with the lexicographically smallest, plus a fixed number of seeded
    /// random restarts.
    #[default]
    FarthestFirst,
    /// `k` distinct columns drawn with the seeded generator.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KMeansOptions {
    pub k: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub init: Initialization,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions {
            k: 8,
            max_iters: 100,
            seed: 42,
            init: Initialization::FarthestFirst,
        }
    }
}

impl KMeansOptions {
    pub fn with_k(k: usize) -> Self {
        KMeansOptions {
            k,
            ..Default::default()
        }
    }
}

/// Lloyd's K-means over the predicate columns of `matrix`.
///
/// With farthest-first seeding, every start described on
/// [`Initialization::FarthestFirst`] is run and the lowest final objective is
/// kept; the returned trace belongs to the winning run.
///
/// Once an assignment step changes nothing, a pass of single-point transfers
/// runs: a point moves to another cluster whenever that strictly lowers the
/// objective with both means updated. Lloyd steps resume after any transfer.
/// Stops when neither changes a membership or after `max_iters` update steps. If `k` exceeds the number of distinct columns,
/// fewer clusters are returned.
pub fn kmeans<T: Scalar>(
    matrix: &QueryPredicateMatrix,
    opts: &KMeansOptions,
) -> Result<ClusterSet<T>> {
    if opts.k == 0 {
        return Err(Error::Clustering("k must be at least 1".into()));
    }
    if opts.max_iters == 0 {
        return Err(Error::Clustering("max_iters must be at least 1".into()));
    }
    let points: Vec<Vec<T>> = matrix.columns();
    if points.is_empty() {
        return Err(Error::Clustering("no predicates to cluster".into()));
    }

    let runs = match opts.init {
        Initialization::FarthestFirst => {
            let mut runs: Vec<Run<T>> = start_columns(&points)
                .into_iter()
                .map(|first| {
                    lloyd(
                        &points,
                        farthest_first(&points, first, opts.k),
                        opts.max_iters,
                    )
                })
                .collect();
            for r in 0..RESTARTS {
                runs.push(lloyd(
                    &points,
                    random_distinct(&points, opts.k, opts.seed.wrapping_add(r)),
                    opts.max_iters,
                ));
            }
            runs
        }
        Initialization::Random => {
            vec![lloyd(
                &points,
                random_distinct(&points, opts.k, opts.seed),
                opts.max_iters,
            )]
        }
    };
    // Earlier starts win ties, so the canonical start is kept unless beaten.
    let best = runs
        .into_iter()
        .reduce(|best, run| {
            if run.objective() < best.objective() {
                run
            } else {
                best
            }
        })
        .expect("at least one start");
    Ok(ClusterSet::from_assignment(
        matrix,
        &points,
        &best.assignment,
        opts.k,
        best.iterations,
        best.trace,
    ))
}

/// Seeded random restarts added to the farthest-first starts.
const RESTARTS: u64 = 16;

struct Run<T> {
    assignment: Vec<usize>,
    iterations: usize,
    trace: Vec<T>,
}

impl<T: Scalar> Run<T> {
    fn objective(&self) -> T {
        *self.trace.last().expect("at least one update step")
    }
}

fn lloyd<T: Scalar>(points: &[Vec<T>], mut centroids: Vec<Vec<T>>, max_iters: usize) -> Run<T> {
    let mut assignment = assign(points, &centroids);
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        repair_empty(points, &mut assignment, centroids.len());
        centroids = update(points, &assignment);
        trace.push(objective(points, &assignment, &centroids));
        iterations += 1;
        if iterations >= max_iters {
            break;
        }
        let next = assign(points, &centroids);
        if next != assignment {
            assignment = next;
        } else if !transfer_pass(points, &mut assignment, centroids.len()) {
            break;
        }
    }
    Run {
        assignment,
        iterations,
        trace,
    }
}

/// Seeds for farthest-first traversal: the lexicographically smallest column
/// first, then each further distinct column in predicate order.
fn start_columns<T: Scalar>(points: &[Vec<T>]) -> Vec<usize> {
    let canonical = (1..points.len()).fold(0, |best, i| {
        if lexicographic_lt(&points[i], &points[best]) {
            i
        } else {
            best
        }
    });
    let mut starts = vec![canonical];
    for i in 0..points.len() {
        if !starts.iter().any(|&s| points[s] == points[i]) {
            starts.push(i);
        }
    }
    starts
}

fn farthest_first<T: Scalar>(points: &[Vec<T>], first: usize, k: usize) -> Vec<Vec<T>> {
    let mut chosen = vec![points[first].clone()];
    let mut nearest: Vec<T> = points
        .iter()
        .map(|p| squared_distance(p, &chosen[0]))
        .collect();
    while chosen.len() < k {
        let (idx, dist) = nearest
            .iter()
            .enumerate()
            .fold(
                (0, nearest[0]),
                |(bi, bd), (i, &d)| if d > bd { (i, d) } else { (bi, bd) },
            );
        if dist == T::zero() {
            break;
        }
        chosen.push(points[idx].clone());
        let c = chosen.last().expect("just pushed");
        for (n, p) in nearest.iter_mut().zip(points) {
            let d = squared_distance(p, c);
            if d < *n {
                *n = d;
            }
        }
    }
    chosen
}

fn random_distinct<T: Scalar>(points: &[Vec<T>], k: usize, seed: u64) -> Vec<Vec<T>> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut chosen: Vec<Vec<T>> = Vec::with_capacity(k);
    for i in order {
        if chosen.len() == k {
            break;
        }
        if !chosen.iter().any(|c| c == &points[i]) {
            chosen.push(points[i].clone());
        }
    }
    chosen
}

fn lexicographic_lt<T: Scalar>(a: &[T], b: &[T]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Nearest centroid per point; ties go to the lowest cluster index.
fn assign<T: Scalar>(points: &[Vec<T>], centroids: &[Vec<T>]) -> Vec<usize> {
    points
        .iter()
        .map(|p| {
            let mut best = 0;
            let mut best_d = squared_distance(p, &centroids[0]);
            for (c, centroid) in centroids.iter().enumerate().skip(1) {
                let d = squared_distance(p, centroid);
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            best
        })
        .collect()
}

fn members(assignment: &[usize], n_clusters: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); n_clusters];
    for (p, &c) in assignment.iter().enumerate() {
        out[c].push(p);
    }
    out
}

/// Gives every empty cluster the point farthest from its own cluster mean,
/// taken from a cluster with at least two members. Clusters that cannot be
/// refilled (all remaining points sit on their means) are dropped and the
/// cluster indices compacted.
fn repair_empty<T: Scalar>(points: &[Vec<T>], assignment: &mut [usize], n_clusters: usize) {
    let dim = points[0].len();
    loop {
        let groups = members(assignment, n_clusters);
        let Some(empty) = groups.iter().position(Vec::is_empty) else {
            return;
        };
        let means: Vec<Option<Vec<T>>> = groups
            .iter()
            .map(|g| (!g.is_empty()).then(|| mean(g.iter().map(|&i| points[i].as_slice()), dim)))
            .collect();
        let mut candidate: Option<(usize, T)> = None;
        for (p, &c) in assignment.iter().enumerate() {
            if groups[c].len() < 2 {
                continue;
            }
            let d = squared_distance(&points[p], means[c].as_ref().expect("nonempty"));
            if d > T::zero() && candidate.as_ref().is_none_or(|(_, bd)| d > *bd) {
                candidate = Some((p, d));
            }
        }
        match candidate {
            Some((p, _)) => assignment[p] = empty,
            None => {
                let mut remap = vec![0; n_clusters];
                let mut next = 0;
                for (c, g) in groups.iter().enumerate() {
                    remap[c] = next;
                    if !g.is_empty() {
                        next += 1;
                    }
                }
                for a in assignment.iter_mut() {
                    *a = remap[*a];
                }
                return;
            }
        }
    }
}

/// One sweep of single-point transfers in point order, updating cluster sums
/// after every move. Moving `x` out of cluster `a` (size `n_a >= 2`) saves
/// `n_a / (n_a - 1) * |x - mu_a|^2`; adding it to `b` costs
/// `n_b / (n_b + 1) * |x - mu_b|^2`. The cheapest strictly improving target
/// wins, ties to the lower index. Returns whether anything moved.
fn transfer_pass<T: Scalar>(
    points: &[Vec<T>],
    assignment: &mut [usize],
    n_clusters: usize,
) -> bool {
    let dim = points[0].len();
    let mut sums = vec![vec![T::zero(); dim]; n_clusters];
    let mut counts = vec![0usize; n_clusters];
    for (p, &c) in points.iter().zip(assignment.iter()) {
        counts[c] += 1;
        for (s, &v) in sums[c].iter_mut().zip(p) {
            *s = *s + v;
        }
    }
    let scaled_distance = |x: &[T], sum: &[T], n: usize| {
        let n = T::from_count(n);
        x.iter().zip(sum).fold(T::zero(), |acc, (&v, &s)| {
            let d = v - s / n;
            acc + d * d
        })
    };

    let mut moved = false;
    for (i, x) in points.iter().enumerate() {
        let a = assignment[i];
        if counts[a] < 2 {
            continue;
        }
        let na = T::from_count(counts[a]);
        let saving = na / (na - T::one()) * scaled_distance(x, &sums[a], counts[a]);
        let mut target: Option<(usize, T)> = None;
        for b in (0..n_clusters).filter(|&b| b != a && counts[b] > 0) {
            let nb = T::from_count(counts[b]);
            let cost = nb / (nb + T::one()) * scaled_distance(x, &sums[b], counts[b]);
            if cost < saving && target.as_ref().is_none_or(|(_, best)| cost < *best) {
                target = Some((b, cost));
            }
        }
        if let Some((b, _)) = target {
            for (d, &v) in x.iter().enumerate() {
                sums[a][d] = sums[a][d] - v;
                sums[b][d] = sums[b][d] + v;
            }
            counts[a] -= 1;
            counts[b] += 1;
            assignment[i] = b;
            moved = true;
        }
    }
    moved
}

fn update<T: Scalar>(points: &[Vec<T>], assignment: &[usize]) -> Vec<Vec<T>> {
    let dim = points[0].len();
    let n_clusters = assignment.iter().copied().max().map_or(0, |m| m + 1);
    members(assignment, n_clusters)
        .into_iter()
        .map(|g| {
            if g.is_empty() {
                vec![T::zero(); dim]
            } else {
                mean(g.iter().map(|&i| points[i].as_slice()), dim)
            }
        })
        .collect()
}

fn objective<T: Scalar>(points: &[Vec<T>], assignment: &[usize], centroids: &[Vec<T>]) -> T {
    points
        .iter()
        .zip(assignment)
        .fold(T::zero(), |acc, (p, &c)| {
            acc + squared_distance(p, &centroids[c])
        })
}
