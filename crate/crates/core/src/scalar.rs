//! Scalar abstraction for the clustering math.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::Num;

/// Exact rational scalar. Binary incidence vectors have small means, so
/// `i64` numerators and denominators do not overflow at workload scale.
pub type Rational = Ratio<i64>;

/// Numeric type usable for centroids and variances.
pub trait Scalar: Num + Copy + PartialOrd + Debug + Send + Sync + 'static {
    fn from_count(n: usize) -> Self;
    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    fn from_count(n: usize) -> Self {
        n as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn from_count(n: usize) -> Self {
        n as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for Rational {
    fn from_count(n: usize) -> Self {
        Ratio::from_integer(n as i64)
    }
    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// Squared Euclidean distance.
pub fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

/// Component-wise mean of the given points. `points` must be nonempty.
pub fn mean<'a, T: Scalar, I>(points: I, dim: usize) -> Vec<T>
where
    I: IntoIterator<Item = &'a [T]>,
{
    let mut acc = vec![T::zero(); dim];
    let mut n = 0usize;
    for p in points {
        for (a, &x) in acc.iter_mut().zip(p) {
            *a = *a + x;
        }
        n += 1;
    }
    let n = T::from_count(n);
    acc.into_iter().map(|a| a / n).collect()
}
