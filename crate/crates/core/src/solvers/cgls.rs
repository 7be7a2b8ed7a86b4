use crate::linop::LinearOperator;
use crate::scalar::{dot, norm2, Real};

/// Conjugate gradient on the normal equations, started at zero, so the
/// limit is the minimum-norm least-squares solution. Stops once
/// `‖Aᵀ(b - Ax)‖ ≤ tol · ‖Aᵀb‖`.
pub fn cgls<T: Real, O: LinearOperator<T> + ?Sized>(op: &O, b: &[T], tol: T, max_iter: usize) -> Vec<T> {
    let mut x = vec![T::zero(); op.cols()];
    let mut r = b.to_vec();
    let mut s = op.apply_adjoint(&r);
    let s0 = norm2(&s);
    if s0 == T::zero() {
        return x;
    }
    let mut p = s.clone();
    let mut gamma = dot(&s, &s);
    for _ in 0..max_iter {
        let q = op.apply(&p);
        let qq = dot(&q, &q);
        if qq == T::zero() {
            break;
        }
        let alpha = gamma / qq;
        x.iter_mut().zip(&p).for_each(|(a, &b)| *a = *a + alpha * b);
        r.iter_mut().zip(&q).for_each(|(a, &b)| *a = *a - alpha * b);
        s = op.apply_adjoint(&r);
        let g_new = dot(&s, &s);
        if g_new.sqrt() <= tol * s0 {
            break;
        }
        let beta = g_new / gamma;
        gamma = g_new;
        p.iter_mut().zip(&s).for_each(|(a, &b)| *a = b + beta * *a);
    }
    x
}

/// The operator restricted to a subset of its columns.
pub struct ColumnSubset<'a, T: Real, O: LinearOperator<T> + ?Sized> {
    op: &'a O,
    columns: Vec<usize>,
    _scalar: std::marker::PhantomData<T>,
}

impl<'a, T: Real, O: LinearOperator<T> + ?Sized> ColumnSubset<'a, T, O> {
    pub fn new(op: &'a O, columns: Vec<usize>) -> Self {
        Self {
            op,
            columns,
            _scalar: std::marker::PhantomData,
        }
    }
    pub fn columns(&self) -> &[usize] {
        &self.columns
    }
    /// Scatters subset coefficients into a full-length vector.
    pub fn embed(&self, xs: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.op.cols()];
        for (&c, &v) in self.columns.iter().zip(xs) {
            x[c] = v;
        }
        x
    }
}

impl<T: Real, O: LinearOperator<T> + ?Sized> LinearOperator<T> for ColumnSubset<'_, T, O> {
    fn rows(&self) -> usize {
        self.op.rows()
    }
    fn cols(&self) -> usize {
        self.columns.len()
    }
    fn apply(&self, x: &[T]) -> Vec<T> {
        self.op.apply(&self.embed(x))
    }
    fn apply_adjoint(&self, y: &[T]) -> Vec<T> {
        let full = self.op.apply_adjoint(y);
        self.columns.iter().map(|&c| full[c]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::DenseOperator;

    #[test]
    fn solves_square_system() {
        let a = DenseOperator::<f64>::new(2, 2, vec![2.0, 1.0, 1.0, 3.0]);
        let x = cgls(&a, &[3.0, 5.0], 1e-14, 50);
        assert!((x[0] - 0.8).abs() < 1e-12 && (x[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn minimum_norm_for_wide_system() {
        let a = DenseOperator::<f64>::new(1, 2, vec![1.0, 1.0]);
        let x = cgls(&a, &[2.0], 1e-14, 10);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subset_adjoint() {
        let a = DenseOperator::new(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let s = ColumnSubset::new(&a, vec![0, 2]);
        assert_eq!(s.apply(&[1.0, 1.0]), vec![4.0, 10.0]);
        assert_eq!(s.apply_adjoint(&[1.0, 1.0]), vec![5.0, 9.0]);
    }
}
