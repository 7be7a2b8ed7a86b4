//! `min (1/2M)‖y - Bf‖² + ρ TV(f)  s.t.  f ≥ 0` with isotropic TV on a
//! square image, by a Chambolle–Pock scheme on the stacked operator `[B; ∇]`.

use crate::error::{Error, Result};
use crate::linop::{operator_norm_sq, LinearOperator};
use crate::scalar::{dot, norm2, Real};

use super::config::{RecoveryResult, SolverConfig};
use super::lasso::check_data;

/// Forward differences with Neumann boundary on an `n1 x n1` image; output
/// is the horizontal-index differences followed by the column differences.
#[derive(Clone, Copy, Debug)]
pub struct Gradient2d {
    n1: usize,
}

impl Gradient2d {
    pub fn new(n1: usize) -> Self {
        Self { n1 }
    }
    /// `‖∇‖² ≤ 8` in two dimensions.
    pub fn norm_bound() -> f64 {
        8.0
    }
    pub fn total_variation<T: Real>(&self, f: &[T]) -> T {
        let g = self.apply(f);
        let n = self.n1 * self.n1;
        (0..n).map(|i| (g[i] * g[i] + g[n + i] * g[n + i]).sqrt()).sum()
    }
}

impl<T: Real> LinearOperator<T> for Gradient2d {
    fn rows(&self) -> usize {
        2 * self.n1 * self.n1
    }
    fn cols(&self) -> usize {
        self.n1 * self.n1
    }
    fn apply(&self, f: &[T]) -> Vec<T> {
        let n1 = self.n1;
        let n = n1 * n1;
        let mut g = vec![T::zero(); 2 * n];
        for r in 0..n1 {
            for c in 0..n1 {
                let i = r * n1 + c;
                if r + 1 < n1 {
                    g[i] = f[i + n1] - f[i];
                }
                if c + 1 < n1 {
                    g[n + i] = f[i + 1] - f[i];
                }
            }
        }
        g
    }
    fn apply_adjoint(&self, g: &[T]) -> Vec<T> {
        let n1 = self.n1;
        let n = n1 * n1;
        let mut f = vec![T::zero(); n];
        for r in 0..n1 {
            for c in 0..n1 {
                let i = r * n1 + c;
                if r + 1 < n1 {
                    f[i + n1] = f[i + n1] + g[i];
                    f[i] = f[i] - g[i];
                }
                if c + 1 < n1 {
                    f[i + 1] = f[i + 1] + g[n + i];
                    f[i] = f[i] - g[n + i];
                }
            }
        }
        f
    }
}

/// `residual` is `‖y - Bf̃‖₂`; the objective trace records the full
/// penalised objective at every iterate.
pub fn solve_tv_nonneg<T: Real, O: LinearOperator<T> + ?Sized>(
    op: &O,
    y: &[T],
    rho: T,
    config: &SolverConfig,
) -> Result<RecoveryResult<Vec<T>>> {
    config.check_tolerances()?;
    check_data(op, y)?;
    if !(rho > T::zero()) {
        return Err(Error::InvalidArgument("TV penalty must be positive".into()));
    }
    let n = op.cols();
    let n1 = (n as f64).sqrt().round() as usize;
    if n1 * n1 != n {
        return Err(Error::InvalidArgument(format!("TV needs a square 2-D image, got {n} pixels")));
    }
    let grad = Gradient2d::new(n1);
    let m = T::lit(op.rows() as f64);
    // Equivalent problem with unit-norm data operator:
    // (1/2)‖y/β - Bf/β‖² + (ρM/β²) TV(f), β = ‖B‖.
    let nb = operator_norm_sq(op, 200, config.seed).sqrt();
    if !(nb > T::zero()) {
        return Err(Error::InvalidArgument("TV needs a nonzero operator".into()));
    }
    let inv_nb = T::one() / nb;
    let y_n: Vec<T> = y.iter().map(|&v| v * inv_nb).collect();
    let rho_n = rho * m / (nb * nb);
    let ng = T::lit(Gradient2d::norm_bound()).sqrt();
    let s = T::lit(config.balance);
    let sigma1 = T::one() / s;
    let sigma2 = T::one() / (ng * s);
    let tau = T::lit(0.99) * s / (T::one() + ng);
    let rel_tol = T::lit(config.rel_tol);
    let inv_2m = T::one() / (T::lit(2.0) * m);

    let mut x = vec![T::zero(); n];
    let mut bx = vec![T::zero(); op.rows()];
    let mut bx_bar = bx.clone();
    let mut gx_bar = vec![T::zero(); 2 * n];
    let mut p1 = vec![T::zero(); op.rows()];
    let mut p2 = vec![T::zero(); 2 * n];
    let mut objective = Vec::new();
    let mut converged = false;
    let mut iterations = config.max_iterations;

    for it in 0..config.max_iterations {
        let p1_new: Vec<T> = p1
            .iter()
            .zip(bx_bar.iter().zip(&y_n))
            .map(|(&p, (&b, &v))| (p + sigma1 * (b - v)) / (T::one() + sigma1))
            .collect();
        let mut p2_new: Vec<T> = p2.iter().zip(&gx_bar).map(|(&p, &g)| p + sigma2 * g).collect();
        for i in 0..n {
            let mag = (p2_new[i] * p2_new[i] + p2_new[n + i] * p2_new[n + i]).sqrt();
            if mag > rho_n {
                let k = rho_n / mag;
                p2_new[i] = p2_new[i] * k;
                p2_new[n + i] = p2_new[n + i] * k;
            }
        }
        let bt: Vec<T> = op.apply_adjoint(&p1_new).into_iter().map(|v| v * inv_nb).collect();
        let gt = grad.apply_adjoint(&p2_new);
        let x_new: Vec<T> = x
            .iter()
            .zip(bt.iter().zip(&gt))
            .map(|(&a, (&b, &c))| (a - tau * (b + c)).max(T::zero()))
            .collect();
        let bx_new: Vec<T> = op.apply(&x_new).into_iter().map(|v| v * inv_nb).collect();
        let gx_new = grad.apply(&x_new);

        let r: Vec<T> = y_n.iter().zip(&bx_new).map(|(&a, &b)| (a - b) * nb).collect();
        let tv: T = (0..n).map(|i| (gx_new[i] * gx_new[i] + gx_new[n + i] * gx_new[n + i]).sqrt()).sum();
        objective.push((inv_2m * dot(&r, &r) + rho * tv).as_f64());

        let dx: Vec<T> = x_new.iter().zip(&x).map(|(&a, &b)| a - b).collect();
        let dp1: Vec<T> = p1_new.iter().zip(&p1).map(|(&a, &b)| a - b).collect();
        let dp2: Vec<T> = p2_new.iter().zip(&p2).map(|(&a, &b)| a - b).collect();
        let dp = (dot(&dp1, &dp1) + dot(&dp2, &dp2)).sqrt();
        let pn = (dot(&p1_new, &p1_new) + dot(&p2_new, &p2_new)).sqrt();
        let done = norm2(&dx) <= rel_tol * norm2(&x_new) && dp <= rel_tol * pn;

        bx_bar = bx_new.iter().zip(&bx).map(|(&a, &b)| a + a - b).collect();
        let gx_old = grad.apply(&x);
        gx_bar = gx_new.iter().zip(&gx_old).map(|(&a, &b)| a + a - b).collect();
        x = x_new;
        bx = bx_new;
        p1 = p1_new;
        p2 = p2_new;
        if done {
            converged = true;
            iterations = it + 1;
            break;
        }
    }
    let fit = op.apply(&x);
    let res: Vec<T> = y.iter().zip(&fit).map(|(&a, &b)| a - b).collect();
    Ok(RecoveryResult {
        estimate: x,
        iterations,
        residual: norm2(&res).as_f64(),
        objective,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::{adjoint_mismatch, DenseOperator};
    use crate::rng::rng_from_seed;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn gradient_adjoint() {
        assert!(adjoint_mismatch::<f64, _>(&Gradient2d::new(7), 1) < 1e-14);
        let n = operator_norm_sq::<f64, _>(&Gradient2d::new(16), 500, 2);
        assert!(n <= 8.0);
    }

    fn random_op(m: usize, n: usize) -> DenseOperator<f64> {
        let mut rng = rng_from_seed(7);
        DenseOperator::new(m, n, (0..m * n).map(|_| StandardNormal.sample(&mut rng)).collect())
    }

    #[test]
    fn zero_data_gives_zero() {
        let b = random_op(20, 64);
        let r = solve_tv_nonneg(&b, &vec![0.0; 20], 0.1, &SolverConfig::tv(0.1)).unwrap();
        assert!(r.estimate.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn huge_penalty_gives_flat_image() {
        let b = random_op(30, 64);
        let truth: Vec<f64> = (0..64).map(|i| if i % 8 < 4 { 1.0 } else { 0.0 }).collect();
        let y = b.apply(&truth);
        let r = solve_tv_nonneg(&b, &y, 1e6, &SolverConfig::tv(1e6)).unwrap();
        let lo = r.estimate.iter().cloned().fold(f64::MAX, f64::min);
        let hi = r.estimate.iter().cloned().fold(f64::MIN, f64::max);
        assert!(lo >= 0.0);
        assert!(hi - lo <= 1e-6 * (1.0 + hi.abs()), "{lo} {hi}");
    }

    #[test]
    fn recovers_piecewise_constant() {
        let b = random_op(48, 64);
        let truth: Vec<f64> = (0..64).map(|i| if (i / 8) < 4 && (i % 8) < 5 { 2.0 } else { 0.5 }).collect();
        let y = b.apply(&truth);
        let r = solve_tv_nonneg(&b, &y, 1e-2, &SolverConfig::tv(1e-2)).unwrap();
        let snr = crate::solvers::snr_db(&r.estimate, &truth).unwrap();
        assert!(snr > 30.0, "{snr}");
        let first = r.objective[9];
        assert!(*r.objective.last().unwrap() <= first);
    }
}
