//! Real linear operators with an explicit adjoint, and dense matrices.

use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::rng::rng_from_seed;
use crate::scalar::{dot, norm2, Real};

/// Work size above which dense products run on the rayon pool.
const PARALLEL_WORK: usize = 1 << 17;

pub trait LinearOperator<T: Real>: Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn apply(&self, x: &[T]) -> Vec<T>;
    fn apply_adjoint(&self, y: &[T]) -> Vec<T>;
}

impl<T: Real, O: LinearOperator<T> + ?Sized> LinearOperator<T> for &O {
    fn rows(&self) -> usize {
        (**self).rows()
    }
    fn cols(&self) -> usize {
        (**self).cols()
    }
    fn apply(&self, x: &[T]) -> Vec<T> {
        (**self).apply(x)
    }
    fn apply_adjoint(&self, y: &[T]) -> Vec<T> {
        (**self).apply_adjoint(y)
    }
}

/// Row-major dense real matrix.
#[derive(Clone, Debug)]
pub struct DenseOperator<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseOperator<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "dense operator payload");
        Self { rows, cols, data }
    }

    /// Materialises any operator column by column.
    pub fn from_operator<O: LinearOperator<T> + ?Sized>(op: &O) -> Self {
        let (m, n) = (op.rows(), op.cols());
        let mut data = vec![T::zero(); m * n];
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e[j] = T::one();
            let col = op.apply(&e);
            e[j] = T::zero();
            for i in 0..m {
                data[i * n + j] = col[i];
            }
        }
        Self::new(m, n, data)
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }
}

impl<T: Real> LinearOperator<T> for DenseOperator<T> {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        if self.data.len() >= PARALLEL_WORK {
            self.data.par_chunks_exact(self.cols).map(|r| dot(r, x)).collect()
        } else {
            self.data.chunks_exact(self.cols).map(|r| dot(r, x)).collect()
        }
    }

    fn apply_adjoint(&self, y: &[T]) -> Vec<T> {
        assert_eq!(y.len(), self.rows);
        let n = self.cols;
        let mut out = vec![T::zero(); n];
        let kernel = |j0: usize, chunk: &mut [T]| {
            let w = chunk.len();
            for (i, &yi) in y.iter().enumerate() {
                if yi == T::zero() {
                    continue;
                }
                let row = &self.data[i * n + j0..i * n + j0 + w];
                for (o, &a) in chunk.iter_mut().zip(row) {
                    *o = *o + a * yi;
                }
            }
        };
        if self.data.len() >= PARALLEL_WORK {
            const CHUNK: usize = 256;
            out.par_chunks_mut(CHUNK)
                .enumerate()
                .for_each(|(c, chunk)| kernel(c * CHUNK, chunk));
        } else {
            kernel(0, &mut out);
        }
        out
    }
}

/// Power-iteration estimate of `‖A‖²` (largest eigenvalue of `AᵀA`).
pub fn operator_norm_sq<T: Real, O: LinearOperator<T> + ?Sized>(op: &O, iterations: usize, seed: u64) -> T {
    let mut rng = rng_from_seed(seed);
    let mut x: Vec<T> = (0..op.cols()).map(|_| T::lit(rng.sample(StandardNormal))).collect();
    let nx = norm2(&x);
    if nx == T::zero() {
        return T::zero();
    }
    x.iter_mut().for_each(|v| *v = *v / nx);
    let mut est = T::zero();
    for _ in 0..iterations.max(1) {
        let y = op.apply_adjoint(&op.apply(&x));
        let ny = norm2(&y);
        if ny == T::zero() {
            return T::zero();
        }
        let prev = est;
        est = ny;
        x = y.into_iter().map(|v| v / ny).collect();
        if Float::abs(est - prev) <= T::lit(1e-10) * est {
            break;
        }
    }
    est
}

/// Relative mismatch `|⟨Ax, y⟩ - ⟨x, Aᵀy⟩| / (‖Ax‖‖y‖)` for random `x, y`.
pub fn adjoint_mismatch<T: Real, O: LinearOperator<T> + ?Sized>(op: &O, seed: u64) -> T {
    let mut rng = rng_from_seed(seed);
    let x: Vec<T> = (0..op.cols()).map(|_| T::lit(rng.sample(StandardNormal))).collect();
    let y: Vec<T> = (0..op.rows()).map(|_| T::lit(rng.sample(StandardNormal))).collect();
    let ax = op.apply(&x);
    let aty = op.apply_adjoint(&y);
    let lhs = dot(&ax, &y);
    let rhs = dot(&x, &aty);
    let scale = (norm2(&ax) * norm2(&y)).max(norm2(&x) * norm2(&aty)).max(T::min_positive_value());
    Float::abs(lhs - rhs) / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(m: usize, n: usize, seed: u64) -> DenseOperator<f64> {
        let mut rng = rng_from_seed(seed);
        DenseOperator::new(m, n, (0..m * n).map(|_| rng.sample(StandardNormal)).collect())
    }

    #[test]
    fn dense_adjoint_small_and_parallel() {
        for (m, n) in [(5, 7), (600, 300)] {
            let a = sample(m, n, 1);
            assert!(adjoint_mismatch(&a, 2) < 1e-13);
            let round = DenseOperator::from_operator(&a);
            assert_eq!(round.data(), a.data());
        }
    }

    #[test]
    fn power_iteration_on_diagonal() {
        let a = DenseOperator::new(3, 3, vec![3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.5]);
        let l = operator_norm_sq(&a, 500, 4);
        assert!((l - 9.0).abs() < 1e-6);
    }
}
