//! Deterministic recovery of a constant-diagonal Hermitian matrix from
//! `Q(Q-1) + 1` structured rank-one projections.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::scalar::{cis, Real};
use crate::sensing::SropOperator;

/// Vectors `e_q + γ e_r` for `q < r` and `γ ∈ {1, -i}` in lexicographic
/// order, followed by one vector `β` that pins the trace: the all-ones
/// vector for `Q ≥ 3`, and `(1, e^{iπ/4})` for `Q = 2` where the all-ones
/// equation is degenerate.
#[derive(Clone, Debug)]
pub struct NyquistSketchSet<T: Real> {
    q: usize,
    pairs: Vec<(usize, usize)>,
    extra: Vec<Complex<T>>,
}

impl<T: Real> NyquistSketchSet<T> {
    pub fn new(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("need at least one core".into()));
        }
        let pairs = (0..q).flat_map(|a| (a + 1..q).map(move |b| (a, b))).collect();
        let one = Complex::new(T::one(), T::zero());
        let mut extra = vec![one; q];
        if q == 2 {
            extra[1] = cis(T::FRAC_PI_4());
        }
        Ok(Self { q, pairs, extra })
    }

    pub fn cores(&self) -> usize {
        self.q
    }
    pub fn len(&self) -> usize {
        2 * self.pairs.len() + 1
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// All vectors, row by row.
    pub fn vectors(&self) -> Vec<Complex<T>> {
        let q = self.q;
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = Vec::with_capacity(self.len() * q);
        for &(a, b) in &self.pairs {
            for gamma in [Complex::new(T::one(), T::zero()), Complex::new(T::zero(), -T::one())] {
                let mut v = vec![zero; q];
                v[a] = Complex::new(T::one(), T::zero());
                v[b] = gamma;
                out.extend(v);
            }
        }
        out.extend(self.extra.iter().copied());
        out
    }

    pub fn operator(&self) -> SropOperator<T> {
        SropOperator::from_vectors(self.q, self.vectors()).expect("non-empty sketch set")
    }

    pub fn extra(&self) -> &[Complex<T>] {
        &self.extra
    }
}

/// Closed-form inverse of the SROP map on constant-diagonal matrices.
///
/// With `c_qr = (h₁ + i h₋ᵢ)/2 = H[q,r] + (1+i) tr H / Q`, the last
/// measurement `y_β = tr H + 2 Re Σ_{q<r} conj(β_q) β_r H[q,r]` is linear
/// in `tr H` once the `c_qr` are known.
pub fn nyquist_recover<T: Real>(set: &NyquistSketchSet<T>, y: &[T]) -> Result<HermitianMatrix<T>> {
    if y.len() != set.len() {
        return Err(Error::MeasurementCount {
            expected: set.len(),
            got: y.len(),
        });
    }
    let q = set.q;
    let two = T::lit(2.0);
    let qf = T::lit(q as f64);
    let one_i = Complex::new(T::one(), T::one());
    let beta = &set.extra;
    let mut coupling = Complex::new(T::zero(), T::zero());
    let mut known = T::zero();
    let mut c = Vec::with_capacity(set.pairs.len());
    for (p, &(a, b)) in set.pairs.iter().enumerate() {
        let cab = Complex::new(y[2 * p], y[2 * p + 1]) / two;
        let w = beta[a].conj() * beta[b];
        coupling = coupling + w * one_i;
        known = known + (w * cab).re;
        c.push(cab);
    }
    let coeff = T::one() - two / qf * coupling.re;
    let trace = (y[y.len() - 1] - two * known) / coeff;
    let d = trace / qf;
    let shift = one_i * (trace / qf);
    let mut off = vec![Complex::new(T::zero(), T::zero()); q * q];
    for (&(a, b), &cab) in set.pairs.iter().zip(&c) {
        off[a * q + b] = cab - shift;
    }
    Ok(HermitianMatrix::from_upper(q, |j, k| {
        if j == k {
            Complex::new(d, T::zero())
        } else {
            off[j * q + k]
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(q: usize, c: f64, seed: u64) -> f64 {
        let h = HermitianMatrix::<f64>::random_constant_diagonal(q, c, seed);
        let set = NyquistSketchSet::new(q).unwrap();
        let y = set.operator().forward(&h).unwrap();
        let back = nyquist_recover(&set, &y).unwrap();
        let err = back
            .entries()
            .iter()
            .zip(h.entries())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        err / h.frobenius_norm()
    }

    #[test]
    fn counts() {
        for q in 1..7 {
            let set = NyquistSketchSet::<f64>::new(q).unwrap();
            assert_eq!(set.len(), q * (q - 1) + 1);
            assert_eq!(set.vectors().len(), set.len() * q);
        }
        assert_eq!(NyquistSketchSet::<f64>::new(2).unwrap().len(), 3);
    }

    #[test]
    fn scaled_identity_exact() {
        let set = NyquistSketchSet::<f64>::new(4).unwrap();
        let h = HermitianMatrix::scaled_identity(4, 1.7);
        let back = nyquist_recover(&set, &set.operator().forward(&h).unwrap()).unwrap();
        assert!(back.sub(&h).frobenius_norm() < 1e-13);
    }

    #[test]
    fn random_round_trips() {
        for q in [1, 2, 3, 5, 8] {
            for seed in 0..5 {
                assert!(round_trip(q, 0.3 + seed as f64, seed) <= 1e-10, "q={q}");
            }
        }
    }

    #[test]
    fn wrong_count_is_rejected() {
        let set = NyquistSketchSet::<f64>::new(3).unwrap();
        assert!(nyquist_recover(&set, &[0.0; 6]).is_err());
    }
}
