//! Unitary DFT on centred pixel grids.
//!
//! Pixel `a` carries the centred coordinate `s = a - n1/2`, so
//! `(F f)_χ = N^{-1/2} Σ_s f_s exp(-i 2π χ·s / n1)` with χ in DFT bin order.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;
use crate::scalar::Real;

#[derive(Clone)]
pub struct CentredFourier<T: Real> {
    dim: usize,
    n1: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    norm: T,
}

impl<T: Real> std::fmt::Debug for CentredFourier<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CentredFourier")
            .field("dim", &self.dim)
            .field("n1", &self.n1)
            .finish()
    }
}

impl<T: Real> CentredFourier<T> {
    pub fn new(grid: &Grid<T>) -> Self {
        let mut planner = FftPlanner::new();
        let n1 = grid.n1();
        Self {
            dim: grid.dim(),
            n1,
            forward: planner.plan_fft_forward(n1),
            inverse: planner.plan_fft_inverse(n1),
            norm: T::one() / T::lit(grid.len() as f64).sqrt(),
        }
    }

    pub fn len(&self) -> usize {
        self.n1.pow(self.dim as u32)
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Rotates each axis by `n1/2` (its own inverse for even `n1`).
    fn shift<U: Copy>(&self, x: &[U]) -> Vec<U> {
        let n = self.n1;
        let h = n / 2;
        if self.dim == 1 {
            (0..n).map(|i| x[(i + h) % n]).collect()
        } else {
            let mut out = Vec::with_capacity(n * n);
            for r in 0..n {
                let rs = (r + h) % n;
                for c in 0..n {
                    out.push(x[rs * n + (c + h) % n]);
                }
            }
            out
        }
    }

    fn transform(&self, buf: &mut [Complex<T>], plan: &Arc<dyn Fft<T>>) {
        let n = self.n1;
        if self.dim == 1 {
            plan.process(buf);
            return;
        }
        plan.process(buf);
        let mut col = vec![Complex::new(T::zero(), T::zero()); n];
        for c in 0..n {
            for r in 0..n {
                col[r] = buf[r * n + c];
            }
            plan.process(&mut col);
            for r in 0..n {
                buf[r * n + c] = col[r];
            }
        }
    }

    /// `F f` for a real image.
    pub fn forward_real(&self, f: &[T]) -> Vec<Complex<T>> {
        assert_eq!(f.len(), self.len());
        let mut buf: Vec<Complex<T>> = self.shift(f).into_iter().map(|x| Complex::new(x, T::zero())).collect();
        self.transform(&mut buf, &self.forward);
        buf.iter_mut().for_each(|z| *z = *z * self.norm);
        buf
    }

    /// `F f` for a complex image.
    pub fn forward(&self, f: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(f.len(), self.len());
        let mut buf = self.shift(f);
        self.transform(&mut buf, &self.forward);
        buf.iter_mut().for_each(|z| *z = *z * self.norm);
        buf
    }

    /// `F^H u`, returned on the centred pixel grid.
    pub fn adjoint(&self, u: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(u.len(), self.len());
        let mut buf = u.to_vec();
        self.transform(&mut buf, &self.inverse);
        buf.iter_mut().for_each(|z| *z = *z * self.norm);
        self.shift(&buf)
    }
}
