//! Symmetric rank-one projections `y_m = α_m^* H α_m`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::scalar::Real;
use crate::sketch::SketchBatch;

use super::debias;

/// Work size (`M·Q²`) above which sketches are processed in parallel.
const PAR_WORK: usize = 1 << 16;

#[derive(Clone, Debug)]
pub struct SropOperator<T: Real> {
    q: usize,
    m: usize,
    values: Vec<Complex<T>>,
    /// `A^a = (1/M) Σ_m α_m α_m^*`.
    mean_outer: HermitianMatrix<T>,
    sq_norms: Vec<T>,
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// `α^* X α` for row-major `X`.
#[inline]
pub(crate) fn quad<T: Real>(x: &[Complex<T>], a: &[Complex<T>]) -> Complex<T> {
    let q = a.len();
    let mut acc = zero();
    for j in 0..q {
        let row = &x[j * q..(j + 1) * q];
        let mut r = zero();
        for k in 0..q {
            r = r + row[k] * a[k];
        }
        acc = acc + a[j].conj() * r;
    }
    acc
}

impl<T: Real> SropOperator<T> {
    pub fn new(batch: &SketchBatch<T>) -> Self {
        Self::from_vectors(batch.cores(), batch.values().to_vec()).expect("batch is well formed")
    }

    /// Arbitrary sketch vectors, concatenated row by row.
    pub fn from_vectors(q: usize, values: Vec<Complex<T>>) -> Result<Self> {
        if q == 0 || values.is_empty() || values.len() % q != 0 {
            return Err(Error::DimensionMismatch {
                expected: q.max(1),
                got: values.len(),
                context: "sketch vectors must be non-empty rows of length Q",
            });
        }
        let m = values.len() / q;
        let mut acc = vec![zero::<T>(); q * q];
        for a in values.chunks_exact(q) {
            for j in 0..q {
                for k in 0..q {
                    acc[j * q + k] = acc[j * q + k] + a[j] * a[k].conj();
                }
            }
        }
        let inv_m = T::one() / T::lit(m as f64);
        let mean_outer = HermitianMatrix::from_upper(q, |j, k| acc[j * q + k] * inv_m);
        let sq_norms = values
            .chunks_exact(q)
            .map(|a| a.iter().map(|z| z.norm_sqr()).sum())
            .collect();
        Ok(Self {
            q,
            m,
            values,
            mean_outer,
            sq_norms,
        })
    }

    pub fn cores(&self) -> usize {
        self.q
    }
    pub fn len(&self) -> usize {
        self.m
    }
    pub fn is_empty(&self) -> bool {
        self.m == 0
    }
    pub fn sketch(&self, m: usize) -> &[Complex<T>] {
        &self.values[m * self.q..(m + 1) * self.q]
    }
    pub fn mean_outer(&self) -> &HermitianMatrix<T> {
        &self.mean_outer
    }

    fn check_order(&self, h: &HermitianMatrix<T>) -> Result<()> {
        if h.order() != self.q {
            return Err(Error::DimensionMismatch {
                expected: self.q,
                got: h.order(),
                context: "matrix order vs sketch length",
            });
        }
        Ok(())
    }

    fn check_len(&self, z: &[T]) -> Result<()> {
        if z.len() != self.m {
            return Err(Error::MeasurementCount {
                expected: self.m,
                got: z.len(),
            });
        }
        Ok(())
    }

    /// Complex quadratic forms without the realness check.
    pub(crate) fn quads(&self, entries: &[Complex<T>]) -> Vec<Complex<T>> {
        if self.m * self.q * self.q >= PAR_WORK {
            self.values.par_chunks_exact(self.q).map(|a| quad(entries, a)).collect()
        } else {
            self.values.chunks_exact(self.q).map(|a| quad(entries, a)).collect()
        }
    }

    /// `y_m = α_m^* H α_m`; a relative imaginary residue above rounding
    /// level means `H` was not Hermitian.
    pub fn forward(&self, h: &HermitianMatrix<T>) -> Result<Vec<T>> {
        self.check_order(h)?;
        let fro = h.frobenius_norm();
        let rel = T::lit(1e-12).max(T::lit(64.0) * T::epsilon());
        let z = self.quads(h.entries());
        let mut out = Vec::with_capacity(self.m);
        for (v, &n2) in z.iter().zip(&self.sq_norms) {
            let tol = rel * fro * n2;
            if crate::scalar::abs(v.im) > tol {
                return Err(Error::NotHermitian {
                    residual: crate::scalar::abs(v.im).as_f64(),
                    tolerance: tol.as_f64(),
                });
            }
            out.push(v.re);
        }
        Ok(out)
    }

    /// `y_c,m = ⟨α_m α_m^* - A^a, H⟩`, blind to the diagonal of `H` for
    /// unit-modulus sketches.
    pub fn centered_forward(&self, h: &HermitianMatrix<T>) -> Result<Vec<T>> {
        let y = self.forward(h)?;
        let offset = self.mean_outer.inner(h);
        Ok(y.into_iter().map(|v| v - offset).collect())
    }

    /// `A*(z) = Σ_m z_m α_m α_m^*`.
    pub fn adjoint(&self, z: &[T]) -> Result<HermitianMatrix<T>> {
        self.check_len(z)?;
        let q = self.q;
        let acc = self.outer_sum(z);
        Ok(HermitianMatrix::from_upper(q, |j, k| acc[j * q + k]))
    }

    /// `A_c*(z) = Σ_m z_m (α_m α_m^* - A^a) = A*(debias(z))`.
    pub fn centered_adjoint(&self, z: &[T]) -> Result<HermitianMatrix<T>> {
        self.check_len(z)?;
        self.adjoint(&debias(z))
    }

    /// Row-major `Σ_m z_m α_m α_m^*`.
    pub(crate) fn outer_sum(&self, z: &[T]) -> Vec<Complex<T>> {
        let q = self.q;
        let accumulate = |mut acc: Vec<Complex<T>>, (a, &w): (&[Complex<T>], &T)| {
            for j in 0..q {
                let aj = a[j] * w;
                for k in j..q {
                    acc[j * q + k] = acc[j * q + k] + aj * a[k].conj();
                }
            }
            acc
        };
        let mut acc = if self.m * q * q >= PAR_WORK {
            self.values
                .par_chunks_exact(q)
                .zip(z.par_iter())
                .fold(|| vec![zero::<T>(); q * q], accumulate)
                .reduce(
                    || vec![zero::<T>(); q * q],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x = *x + y);
                        a
                    },
                )
        } else {
            self.values.chunks_exact(q).zip(z).fold(vec![zero::<T>(); q * q], accumulate)
        };
        for j in 0..q {
            for k in 0..j {
                acc[j * q + k] = acc[k * q + j].conj();
            }
        }
        acc
    }
}

pub fn srop_forward<T: Real>(h: &HermitianMatrix<T>, sketches: &SketchBatch<T>) -> Result<Vec<T>> {
    SropOperator::new(sketches).forward(h)
}

pub fn srop_centered_forward<T: Real>(h: &HermitianMatrix<T>, sketches: &SketchBatch<T>) -> Result<Vec<T>> {
    SropOperator::new(sketches).centered_forward(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::draw_sketches;

    #[test]
    fn identity_gives_q() {
        let s = draw_sketches::<f64>(6, 10, 1, None).unwrap();
        for v in srop_forward(&HermitianMatrix::identity(6), &s).unwrap() {
            assert!((v - 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_double_loop() {
        let h = HermitianMatrix::<f64>::random(4, 9);
        let s = draw_sketches::<f64>(4, 1, 2, None).unwrap();
        let a = s.row(0);
        let mut naive = Complex::new(0.0, 0.0);
        for j in 0..4 {
            for k in 0..4 {
                naive += a[j].conj() * h.get(j, k) * a[k];
            }
        }
        let y = srop_forward(&h, &s).unwrap();
        assert!((y[0] - naive.re).abs() < 1e-12);
    }

    #[test]
    fn mean_tends_to_trace() {
        let q = 5;
        let c = 0.8;
        let h = HermitianMatrix::<f64>::random_constant_diagonal(q, c, 3);
        let s = draw_sketches::<f64>(q, 100_000, 4, None).unwrap();
        let y = srop_forward(&h, &s).unwrap();
        let m = y.len() as f64;
        let mean = y.iter().sum::<f64>() / m;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
        assert!((mean - q as f64 * c).abs() <= 3.0 * var.sqrt() / m.sqrt());
    }

    #[test]
    fn centered_ignores_diagonal() {
        let s = draw_sketches::<f64>(5, 12, 8, None).unwrap();
        let op = SropOperator::new(&s);
        let mut d = HermitianMatrix::zeros(5);
        let diag = HermitianMatrix::from_upper(5, |j, k| {
            if j == k {
                Complex::new(j as f64 - 1.5, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        });
        d.axpy(1.0, &diag);
        for v in op.centered_forward(&d).unwrap() {
            assert!(v.abs() < 1e-12);
        }
        let j = HermitianMatrix::<f64>::random(5, 1);
        let shifted = j.add(&HermitianMatrix::scaled_identity(5, 2.5));
        let a = op.centered_forward(&j).unwrap();
        let b = op.centered_forward(&shifted).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn centered_equals_debiased() {
        let s = draw_sketches::<f64>(3, 6, 5, None).unwrap();
        let j = HermitianMatrix::<f64>::random(3, 6);
        let a = srop_centered_forward(&j, &s).unwrap();
        let b = debias(&srop_forward(&j, &s).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let mut data = HermitianMatrix::<f64>::random(3, 2).into_entries();
        data[1] += Complex::new(0.0, 1.0);
        let h = HermitianMatrix::from_row_major_unchecked(3, data).unwrap();
        let s = draw_sketches::<f64>(3, 4, 1, None).unwrap();
        assert!(matches!(srop_forward(&h, &s), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn adjoint_identity() {
        let s = draw_sketches::<f64>(4, 9, 3, None).unwrap();
        let op = SropOperator::new(&s);
        let h = HermitianMatrix::<f64>::random(4, 4);
        let z: Vec<f64> = (0..9).map(|i| (i as f64 * 0.7).cos()).collect();
        let lhs: f64 = op.forward(&h).unwrap().iter().zip(&z).map(|(a, b)| a * b).sum();
        let rhs = op.adjoint(&z).unwrap().inner(&h);
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
        let lhs_c: f64 = op.centered_forward(&h).unwrap().iter().zip(&z).map(|(a, b)| a * b).sum();
        let rhs_c = op.centered_adjoint(&z).unwrap().inner(&h);
        assert!((lhs_c - rhs_c).abs() < 1e-12 * lhs_c.abs().max(1.0));
    }
}
