//! Dense complex Hermitian matrices with diagonal/hollow splitting.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T> {
    order: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> HermitianMatrix<T> {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            data: vec![Complex::new(T::zero(), T::zero()); order * order],
        }
    }

    pub fn scaled_identity(order: usize, c: T) -> Self {
        let mut m = Self::zeros(order);
        for j in 0..order {
            m.data[j * order + j] = Complex::new(c, T::zero());
        }
        m
    }

    pub fn identity(order: usize) -> Self {
        Self::scaled_identity(order, T::one())
    }

    /// Builds from the upper triangle `f(j, k)` for `j <= k`; the lower
    /// triangle is mirrored and diagonal imaginary parts are dropped.
    pub fn from_upper(order: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(order);
        for j in 0..order {
            for k in j..order {
                let v = f(j, k);
                if j == k {
                    m.data[j * order + j] = Complex::new(v.re, T::zero());
                } else {
                    m.data[j * order + k] = v;
                    m.data[k * order + j] = v.conj();
                }
            }
        }
        m
    }

    /// Row-major entries, checked for Hermitian symmetry to `tol · ‖H‖_F`.
    pub fn from_row_major(order: usize, data: Vec<Complex<T>>, tol: T) -> Result<Self> {
        let m = Self::from_row_major_unchecked(order, data)?;
        let res = m.hermitian_residual();
        let bound = tol * m.frobenius_norm().max(T::min_positive_value());
        if res > bound {
            return Err(Error::NotHermitian {
                residual: res.as_f64(),
                tolerance: bound.as_f64(),
            });
        }
        Ok(m)
    }

    /// Row-major entries without a symmetry check.
    pub fn from_row_major_unchecked(order: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != order * order {
            return Err(Error::DimensionMismatch {
                expected: order * order,
                got: data.len(),
                context: "hermitian matrix entries",
            });
        }
        Ok(Self { order, data })
    }

    /// Random Hermitian matrix with i.i.d. standard normal real and
    /// imaginary parts above the diagonal.
    pub fn random(order: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        Self::from_upper(order, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(T::lit(re), T::lit(im))
        })
    }

    /// Random Hermitian matrix whose diagonal entries all equal `c`.
    pub fn random_constant_diagonal(order: usize, c: T, seed: u64) -> Self {
        let h = Self::random(order, seed).hollow_part();
        h.add(&Self::scaled_identity(order, c))
    }

    pub fn order(&self) -> usize {
        self.order
    }
    #[inline]
    pub fn get(&self, j: usize, k: usize) -> Complex<T> {
        self.data[j * self.order + k]
    }
    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }
    pub fn into_entries(self) -> Vec<Complex<T>> {
        self.data
    }

    /// `J_d`: the diagonal part.
    pub fn diagonal_part(&self) -> Self {
        let mut d = Self::zeros(self.order);
        for j in 0..self.order {
            d.data[j * self.order + j] = self.get(j, j);
        }
        d
    }

    /// `J_h = J - J_d`.
    pub fn hollow_part(&self) -> Self {
        let mut h = self.clone();
        for j in 0..self.order {
            h.data[j * self.order + j] = Complex::new(T::zero(), T::zero());
        }
        h
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.order).map(|j| self.get(j, j).re).collect()
    }

    pub fn trace(&self) -> T {
        (0..self.order).map(|j| self.get(j, j).re).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }
    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }
    pub fn scale(&self, c: T) -> Self {
        Self {
            order: self.order,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }
    /// `self + c * other` in place.
    pub fn axpy(&mut self, c: T, other: &Self) {
        assert_eq!(self.order, other.order);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + b * c;
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        assert_eq!(self.order, other.order, "matrix order mismatch");
        Self {
            order: self.order,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Real Frobenius inner product `Re tr(A^* B)`.
    pub fn inner(&self, other: &Self) -> T {
        assert_eq!(self.order, other.order);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// `max |J[j,k] - conj(J[k,j])|`.
    pub fn hermitian_residual(&self) -> T {
        let q = self.order;
        let mut r = T::zero();
        for j in 0..q {
            for k in j..q {
                r = r.max((self.get(j, k) - self.get(k, j).conj()).norm());
            }
        }
        r
    }

    pub fn matvec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let q = self.order;
        assert_eq!(v.len(), q);
        (0..q)
            .map(|j| {
                let row = &self.data[j * q..(j + 1) * q];
                row.iter().zip(v).fold(Complex::new(T::zero(), T::zero()), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// `α^* H α` as a complex number (its imaginary part is rounding for
    /// Hermitian `H`).
    pub fn quadratic_form(&self, alpha: &[Complex<T>]) -> Complex<T> {
        let hv = self.matvec(alpha);
        alpha
            .iter()
            .zip(&hv)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    fn to_nalgebra(&self) -> DMatrix<Complex<f64>> {
        let q = self.order;
        DMatrix::from_fn(q, q, |j, k| {
            let z = self.get(j, k);
            Complex::new(z.re.as_f64(), z.im.as_f64())
        })
    }

    fn eigen(&self) -> SymmetricEigen<Complex<f64>, nalgebra::Dyn> {
        SymmetricEigen::new(self.to_nalgebra())
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<T> {
        if self.order == 0 {
            return Vec::new();
        }
        let mut ev: Vec<f64> = self.eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev.into_iter().map(T::lit).collect()
    }

    /// Number of singular values above `rel_tol · σ_max`.
    pub fn numerical_rank(&self, rel_tol: T) -> usize {
        let sv: Vec<T> = self.eigenvalues().into_iter().map(|l| l.abs()).collect();
        let smax = sv.iter().fold(T::zero(), |m, &s| m.max(s));
        if smax == T::zero() {
            return 0;
        }
        sv.iter().filter(|&&s| s > rel_tol * smax).count()
    }

    /// `Σ_i max(λ_i - shift, 0) u_i u_i^*`: projection of `H - shift·I`
    /// onto the PSD cone.
    pub fn psd_shrink(&self, shift: T) -> Self {
        let q = self.order;
        if q == 0 {
            return self.clone();
        }
        let eig = self.eigen();
        let shift = shift.as_f64();
        let mut out = vec![Complex::new(0.0f64, 0.0); q * q];
        for (i, &lam) in eig.eigenvalues.iter().enumerate() {
            let l = lam - shift;
            if l <= 0.0 {
                continue;
            }
            let u = eig.eigenvectors.column(i);
            for j in 0..q {
                let uj = u[j] * l;
                for k in 0..q {
                    out[j * q + k] += uj * u[k].conj();
                }
            }
        }
        Self::from_upper(q, |j, k| {
            let z = out[j * q + k];
            Complex::new(T::lit(z.re), T::lit(z.im))
        })
    }

    pub fn project_psd(&self) -> Self {
        self.psd_shrink(T::zero())
    }
}
