//! The interferometric matrix `I[f°]` of a scene seen through a core layout.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::hermitian::HermitianMatrix;
use crate::layout::CoreLayout;
use crate::scalar::{cis, Real};
use crate::scene::SceneImage;

use super::fourier::CentredFourier;

/// How the matrix entries are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixPath {
    /// One FFT of the scene followed by a gather on the visibility bins.
    FftPath,
    /// Per-entry quadrature sum over pixels, valid for off-grid visibilities.
    DirectSum,
}

#[derive(Clone, Debug)]
pub struct InterferometricOperator<T: Real> {
    layout: CoreLayout<T>,
    fourier: CentredFourier<T>,
    scaling: T,
    mode: MatrixPath,
}

impl<T: Real> InterferometricOperator<T> {
    pub fn new(layout: CoreLayout<T>, mode: MatrixPath) -> Self {
        let grid = layout.grid().clone();
        Self {
            fourier: CentredFourier::new(&grid),
            scaling: grid.scaling(),
            layout,
            mode,
        }
    }

    /// FFT path when every visibility is on a bin, direct sum otherwise.
    pub fn auto(layout: CoreLayout<T>) -> Self {
        let mode = if layout.is_on_grid() {
            MatrixPath::FftPath
        } else {
            MatrixPath::DirectSum
        };
        Self::new(layout, mode)
    }

    pub fn layout(&self) -> &CoreLayout<T> {
        &self.layout
    }
    pub fn grid(&self) -> &Grid<T> {
        self.layout.grid()
    }
    pub fn scaling(&self) -> T {
        self.scaling
    }
    pub fn mode(&self) -> MatrixPath {
        self.mode
    }
    pub fn fourier(&self) -> &CentredFourier<T> {
        &self.fourier
    }

    /// `T(u)`: entry `(j, k)` is `u[l(j, k)]`, the diagonal reads bin 0.
    pub fn gather(&self, spectrum: &[Complex<T>]) -> Vec<Complex<T>> {
        self.layout.bins().iter().map(|&b| spectrum[b]).collect()
    }

    /// `T*(X)`: sums every entry of `X` into the bin it was gathered from.
    pub fn scatter(&self, entries: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut u = vec![Complex::new(T::zero(), T::zero()); self.grid().len()];
        for (&b, &x) in self.layout.bins().iter().zip(entries) {
            u[b] = u[b] + x;
        }
        u
    }

    /// `I[f]` for the pixel values `f` (vignetting already applied).
    pub fn matrix(&self, f: &[T]) -> Result<HermitianMatrix<T>> {
        if f.len() != self.grid().len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid().len(),
                got: f.len(),
                context: "interferometric matrix input",
            });
        }
        match self.mode {
            MatrixPath::FftPath => {
                let spec = self.fourier.forward_real(f);
                let entries = self.gather(&spec).into_iter().map(|z| z * self.scaling).collect();
                let mut h = HermitianMatrix::from_row_major_unchecked(self.layout.cores(), entries)?;
                // Clean the rounding-level imaginary diagonal.
                h = HermitianMatrix::from_upper(h.order(), |j, k| h.get(j, k));
                Ok(h)
            }
            MatrixPath::DirectSum => Ok(self.direct_sum(f)),
        }
    }

    fn direct_sum(&self, f: &[T]) -> HermitianMatrix<T> {
        let grid = self.grid();
        let area = grid.pixel_area();
        let lz = grid.lambda_z();
        let p = self.layout.positions();
        let support: Vec<(usize, T)> = f.iter().copied().enumerate().filter(|&(_, v)| v != T::zero()).collect();
        let dim = grid.dim();
        HermitianMatrix::from_upper(self.layout.cores(), |j, k| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for &(pix, v) in &support {
                let x = grid.pixel_position(pix);
                let mut ph = T::zero();
                for ax in 0..dim {
                    ph = ph + (p[k][ax] - p[j][ax]) * x[ax];
                }
                acc = acc + cis(T::two_pi() * ph / lz) * v;
            }
            acc * area
        })
    }
}

/// `I[f°]` for a scene, with `f° = w ⊙ f`.
pub fn interferometric_matrix<T: Real>(scene: &SceneImage<T>, layout: &CoreLayout<T>) -> Result<HermitianMatrix<T>> {
    if &scene.grid != layout.grid() {
        return Err(Error::GridMismatch);
    }
    InterferometricOperator::auto(layout.clone()).matrix(&scene.vignetted())
}

/// Numerical rank of `I[f°]` (eigenvalues above `1e-8` of the largest).
pub fn interferometric_rank_check<T: Real>(scene: &SceneImage<T>, layout: &CoreLayout<T>) -> Result<usize> {
    let h = interferometric_matrix(scene, layout)?;
    Ok(h.numerical_rank(T::lit(1e-8)))
}
