//! The operator `B(v) = ϖ · A_c(T(F(w ⊙ v)))` mapping real images to
//! debiased SROP measurements, with its adjoint.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::layout::CoreLayout;
use crate::linop::{DenseOperator, LinearOperator};
use crate::scalar::Real;
use crate::sketch::SketchBatch;

use super::debias;
use super::interferometric::{InterferometricOperator, MatrixPath};
use super::srop::SropOperator;

#[derive(Clone, Debug)]
pub struct CombinedOperator<T: Real> {
    interferometric: InterferometricOperator<T>,
    srop: SropOperator<T>,
    vignette: Option<Vec<T>>,
}

impl<T: Real> CombinedOperator<T> {
    /// The layout must be on-grid: `B` is defined through the FFT path.
    pub fn new(layout: CoreLayout<T>, sketches: &SketchBatch<T>) -> Result<Self> {
        Self::from_parts(layout, SropOperator::new(sketches))
    }

    pub fn from_parts(layout: CoreLayout<T>, srop: SropOperator<T>) -> Result<Self> {
        if srop.cores() != layout.cores() {
            return Err(Error::DimensionMismatch {
                expected: layout.cores(),
                got: srop.cores(),
                context: "sketch length vs number of cores",
            });
        }
        if !layout.is_on_grid() {
            return Err(Error::InvalidLayout(format!(
                "combined operator needs on-grid visibilities (max residual {:e})",
                layout.max_snap_residual().as_f64()
            )));
        }
        Ok(Self {
            interferometric: InterferometricOperator::new(layout, MatrixPath::FftPath),
            srop,
            vignette: None,
        })
    }

    /// Folds a vignetting window into the operator: `B(v)` then senses `w ⊙ v`.
    pub fn with_vignette(mut self, w: Vec<T>) -> Result<Self> {
        let n = self.interferometric.grid().len();
        if w.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: w.len(),
                context: "vignette",
            });
        }
        self.vignette = Some(w);
        Ok(self)
    }

    pub fn interferometric(&self) -> &InterferometricOperator<T> {
        &self.interferometric
    }
    pub fn srop(&self) -> &SropOperator<T> {
        &self.srop
    }
    pub fn vignette(&self) -> Option<&[T]> {
        self.vignette.as_deref()
    }
    pub fn measurements(&self) -> usize {
        self.srop.len()
    }
    pub fn pixels(&self) -> usize {
        self.interferometric.grid().len()
    }

    fn weighted(&self, v: &[T]) -> Vec<T> {
        match &self.vignette {
            Some(w) => v.iter().zip(w).map(|(&a, &b)| a * b).collect(),
            None => v.to_vec(),
        }
    }

    /// `ϖ · A(T(F(w ⊙ v)))` before debiasing.
    pub fn raw_forward(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.pixels() {
            return Err(Error::DimensionMismatch {
                expected: self.pixels(),
                got: v.len(),
                context: "combined operator input",
            });
        }
        let op = &self.interferometric;
        let spec = op.fourier().forward_real(&self.weighted(v));
        let entries = op.gather(&spec);
        let s = op.scaling();
        Ok(self.srop.quads(&entries).into_iter().map(|z| z.re * s).collect())
    }

    pub fn forward(&self, v: &[T]) -> Result<Vec<T>> {
        Ok(debias(&self.raw_forward(v)?))
    }

    /// Adjoint of the undebiased map; `adjoint(z) = raw_adjoint(debias(z))`.
    pub fn raw_adjoint(&self, z: &[T]) -> Result<Vec<T>> {
        if z.len() != self.measurements() {
            return Err(Error::MeasurementCount {
                expected: self.measurements(),
                got: z.len(),
            });
        }
        Ok(self.pull_back(&self.srop.outer_sum(z)))
    }

    /// `ϖ · w ⊙ Re(F^H T*(X))`.
    fn pull_back(&self, x: &[Complex<T>]) -> Vec<T> {
        let op = &self.interferometric;
        let img = op.fourier().adjoint(&op.scatter(x));
        let s = op.scaling();
        let out: Vec<T> = img.into_iter().map(|c| c.re * s).collect();
        self.weighted(&out)
    }

    pub fn adjoint(&self, z: &[T]) -> Result<Vec<T>> {
        self.raw_adjoint(&debias(z))
    }

    /// Dense `M x N` matrix of `B`, assembled row by row through the adjoint.
    pub fn to_dense(&self) -> DenseOperator<T> {
        let (m, n) = (self.measurements(), self.pixels());
        let q = self.srop.cores();
        let rows: Vec<Vec<T>> = (0..m)
            .into_par_iter()
            .map(|i| {
                let a = self.srop.sketch(i);
                let mut x = Vec::with_capacity(q * q);
                for j in 0..q {
                    for k in 0..q {
                        x.push(a[j] * a[k].conj());
                    }
                }
                self.pull_back(&x)
            })
            .collect();
        let mut data: Vec<T> = rows.into_iter().flatten().collect();
        let inv_m = T::one() / T::lit(m as f64);
        for c in 0..n {
            let mean = (0..m).map(|r| data[r * n + c]).sum::<T>() * inv_m;
            for r in 0..m {
                data[r * n + c] = data[r * n + c] - mean;
            }
        }
        DenseOperator::new(m, n, data)
    }
}

impl<T: Real> LinearOperator<T> for CombinedOperator<T> {
    fn rows(&self) -> usize {
        self.measurements()
    }
    fn cols(&self) -> usize {
        self.pixels()
    }
    fn apply(&self, x: &[T]) -> Vec<T> {
        self.forward(x).expect("input length matches operator")
    }
    fn apply_adjoint(&self, y: &[T]) -> Vec<T> {
        self.adjoint(y).expect("input length matches operator")
    }
}
