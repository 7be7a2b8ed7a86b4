//! `min tr X  s.t.  ‖y - A(X)‖₁ ≤ ε, X ⪰ 0` over Hermitian `Q x Q` matrices.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::linop::{operator_norm_sq, LinearOperator};
use crate::scalar::{norm1, norm2, Real};
use crate::sensing::SropOperator;

use super::config::{RecoveryResult, SolverConfig};
use super::l1::project_l1_ball;

/// The SROP operator acting on Hermitian matrices packed isometrically
/// into `R^{Q²}`: diagonal first, then `√2 Re`, `√2 Im` of each `j < k`.
pub struct PackedSrop<'a, T: Real> {
    srop: &'a SropOperator<T>,
}

impl<'a, T: Real> PackedSrop<'a, T> {
    pub fn new(srop: &'a SropOperator<T>) -> Self {
        Self { srop }
    }

    pub fn pack(h: &HermitianMatrix<T>) -> Vec<T> {
        let q = h.order();
        let s = T::SQRT_2();
        let mut v: Vec<T> = h.diagonal();
        for j in 0..q {
            for k in j + 1..q {
                let z = h.get(j, k);
                v.push(s * z.re);
                v.push(s * z.im);
            }
        }
        v
    }

    pub fn unpack(q: usize, v: &[T]) -> HermitianMatrix<T> {
        let s = T::FRAC_1_SQRT_2();
        let mut offsets = vec![0usize; q * q];
        let mut next = q;
        for j in 0..q {
            for k in j + 1..q {
                offsets[j * q + k] = next;
                next += 2;
            }
        }
        HermitianMatrix::from_upper(q, |j, k| {
            if j == k {
                Complex::new(v[j], T::zero())
            } else {
                let o = offsets[j * q + k];
                Complex::new(s * v[o], s * v[o + 1])
            }
        })
    }
}

impl<T: Real> LinearOperator<T> for PackedSrop<'_, T> {
    fn rows(&self) -> usize {
        self.srop.len()
    }
    fn cols(&self) -> usize {
        self.srop.cores() * self.srop.cores()
    }
    fn apply(&self, x: &[T]) -> Vec<T> {
        let h = Self::unpack(self.srop.cores(), x);
        self.srop.quads(h.entries()).into_iter().map(|z| z.re).collect()
    }
    fn apply_adjoint(&self, y: &[T]) -> Vec<T> {
        Self::pack(&self.srop.adjoint(y).expect("measurement count matches"))
    }
}

/// Chambolle–Pock with the prox `P_PSD(X - τI)` of `tr X + ι_{X ⪰ 0}`.
/// `residual` is `‖y - A(X̃)‖₁`; the objective trace records `tr X`.
pub fn solve_trace_min_psd<T: Real>(
    srop: &SropOperator<T>,
    y: &[T],
    epsilon: T,
    config: &SolverConfig,
) -> Result<RecoveryResult<HermitianMatrix<T>>> {
    config.check_tolerances()?;
    if y.len() != srop.len() {
        return Err(Error::MeasurementCount {
            expected: srop.len(),
            got: y.len(),
        });
    }
    if !(epsilon >= T::zero()) {
        return Err(Error::InvalidArgument("fidelity budget must be nonnegative".into()));
    }
    let q = srop.cores();
    if norm1(y) <= epsilon {
        return Ok(RecoveryResult {
            estimate: HermitianMatrix::zeros(q),
            iterations: 0,
            residual: norm1(y).as_f64(),
            objective: vec![0.0],
            converged: true,
        });
    }
    let op = PackedSrop::new(srop);
    let lip = operator_norm_sq(&op, 200, config.seed).sqrt();
    let balance = T::lit(config.balance);
    let sigma = T::one() / (lip * balance);
    let tau = T::lit(0.99) * balance / lip;
    let rel_tol = T::lit(config.rel_tol);

    let mut x = HermitianMatrix::<T>::zeros(q);
    let mut x_bar = PackedSrop::pack(&x);
    let mut u = vec![T::zero(); y.len()];
    let mut objective = Vec::new();
    let mut converged = false;
    let mut iterations = config.max_iterations;
    for it in 0..config.max_iterations {
        let ax = op.apply(&x_bar);
        let v: Vec<T> = u.iter().zip(&ax).map(|(&a, &b)| a + sigma * b).collect();
        let shifted: Vec<T> = v.iter().zip(y).map(|(&a, &b)| a / sigma - b).collect();
        let proj = project_l1_ball(&shifted, epsilon);
        let u_new: Vec<T> = v
            .iter()
            .zip(proj.iter().zip(y))
            .map(|(&a, (&p, &b))| a - sigma * (p + b))
            .collect();
        let mut step = x.clone();
        step.axpy(-tau, &srop.adjoint(&u_new)?);
        let x_new = step.psd_shrink(tau);
        let xn = PackedSrop::pack(&x_new);
        let xo = PackedSrop::pack(&x);
        let dx: Vec<T> = xn.iter().zip(&xo).map(|(&a, &b)| a - b).collect();
        let du: Vec<T> = u_new.iter().zip(&u).map(|(&a, &b)| a - b).collect();
        x_bar = xn.iter().zip(&xo).map(|(&a, &b)| a + a - b).collect();
        let done = norm2(&dx) <= rel_tol * norm2(&xn) && norm2(&du) <= rel_tol * norm2(&u_new);
        x = x_new;
        u = u_new;
        objective.push(x.trace().as_f64());
        if done {
            converged = true;
            iterations = it + 1;
            break;
        }
    }
    let ax = op.apply(&PackedSrop::pack(&x));
    let res: T = y.iter().zip(&ax).map(|(&a, &b)| crate::scalar::abs(a - b)).sum();
    Ok(RecoveryResult {
        estimate: x,
        iterations,
        residual: res.as_f64(),
        objective,
        converged,
    })
}
