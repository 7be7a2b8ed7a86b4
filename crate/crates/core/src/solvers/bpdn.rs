//! `min ‖x‖₁  s.t.  ‖y - Bx‖₁ ≤ ε` by a Chambolle–Pock primal-dual scheme,
//! followed by a feasibility-restoring polish.

use crate::error::{Error, Result};
use crate::linop::{operator_norm_sq, LinearOperator};
use crate::scalar::{abs, norm1, norm2, norm_inf, Real};

use super::cgls::{cgls, ColumnSubset};
use super::config::{RecoveryResult, SolverConfig};
use super::l1::{project_l1_ball, soft_threshold};
use super::lasso::check_data;

/// Entries below this fraction of `‖x‖∞` are dropped when polishing.
const SUPPORT_CUT: f64 = 1e-3;

fn residual_l1<T: Real, O: LinearOperator<T> + ?Sized>(op: &O, y: &[T], x: &[T]) -> T {
    let bx = op.apply(x);
    y.iter().zip(&bx).map(|(&a, &b)| abs(a - b)).sum()
}

/// Slack allowed on the fidelity constraint.
fn feasible<T: Real>(res: T, eps: T) -> bool {
    res <= eps * T::lit(1.0 + 1e-6) + T::lit(1e-9)
}

/// Smallest step from `x` towards `target` that meets the budget, found by
/// bisection since the residual is convex along the segment. `None` when
/// `target` itself is infeasible.
fn restore_feasibility<T: Real, O: LinearOperator<T> + ?Sized>(
    op: &O,
    y: &[T],
    eps: T,
    x: &[T],
    target: &[T],
) -> Option<(Vec<T>, T)> {
    let at = |t: T| -> Vec<T> { x.iter().zip(target).map(|(&a, &b)| a + t * (b - a)).collect() };
    let end = residual_l1(op, y, target);
    if !feasible(end, eps) {
        return None;
    }
    let (mut lo, mut hi, mut hi_res) = (T::zero(), T::one(), end);
    for _ in 0..60 {
        let mid = (lo + hi) / T::lit(2.0);
        let r = residual_l1(op, y, &at(mid));
        if feasible(r, eps) {
            hi = mid;
            hi_res = r;
        } else {
            lo = mid;
        }
    }
    Some((at(hi), hi_res))
}

/// `residual` is `‖y - Bx̃‖₁`. When the primal-dual iterate misses the
/// budget it is moved towards a least-squares solution, on the detected
/// support when that one is feasible or the minimum-norm solution of
/// `Bx = y` otherwise, just far enough to enter the constraint set.
pub fn solve_bpdn_l1<T: Real, O: LinearOperator<T> + ?Sized>(
    op: &O,
    y: &[T],
    epsilon: T,
    config: &SolverConfig,
) -> Result<RecoveryResult<Vec<T>>> {
    config.check_tolerances()?;
    check_data(op, y)?;
    if !(epsilon >= T::zero()) {
        return Err(Error::InvalidArgument("fidelity budget must be nonnegative".into()));
    }
    let (m, n) = (op.rows(), op.cols());
    if norm1(y) <= epsilon {
        return Ok(RecoveryResult {
            estimate: vec![T::zero(); n],
            iterations: 0,
            residual: norm1(y).as_f64(),
            objective: vec![0.0],
            converged: true,
        });
    }
    let lip = operator_norm_sq(op, 200, config.seed).sqrt();
    let balance = T::lit(config.balance);
    let sigma = T::one() / (lip * balance);
    let tau = T::lit(0.99) * balance / lip;
    let rel_tol = T::lit(config.rel_tol);

    let mut x = vec![T::zero(); n];
    let mut x_bar = x.clone();
    let mut u = vec![T::zero(); m];
    let mut objective = Vec::new();
    let mut converged = false;
    let mut iterations = config.max_iterations;
    for it in 0..config.max_iterations {
        let bx = op.apply(&x_bar);
        let v: Vec<T> = u.iter().zip(&bx).map(|(&a, &b)| a + sigma * b).collect();
        let shifted: Vec<T> = v.iter().zip(y).map(|(&a, &b)| a / sigma - b).collect();
        let proj = project_l1_ball(&shifted, epsilon);
        let u_new: Vec<T> = v
            .iter()
            .zip(proj.iter().zip(y))
            .map(|(&a, (&p, &b))| a - sigma * (p + b))
            .collect();
        let bt = op.apply_adjoint(&u_new);
        let step: Vec<T> = x.iter().zip(&bt).map(|(&a, &b)| a - tau * b).collect();
        let x_new = soft_threshold(&step, tau);
        let dx: Vec<T> = x_new.iter().zip(&x).map(|(&a, &b)| a - b).collect();
        let du: Vec<T> = u_new.iter().zip(&u).map(|(&a, &b)| a - b).collect();
        x_bar = x_new.iter().zip(&x).map(|(&a, &b)| a + a - b).collect();
        let done = norm2(&dx) <= rel_tol * norm2(&x_new) && norm2(&du) <= rel_tol * norm2(&u_new);
        x = x_new;
        u = u_new;
        objective.push(norm1(&x).as_f64());
        if done {
            converged = true;
            iterations = it + 1;
            break;
        }
    }

    let x_res = residual_l1(op, y, &x);
    let mut best = x.clone();
    let mut best_res = x_res;
    let mut best_feasible = feasible(x_res, epsilon);
    if !best_feasible {
        let mut targets = Vec::new();
        let xmax = norm_inf(&x);
        if xmax > T::zero() {
            let mut support: Vec<usize> = (0..n).filter(|&i| abs(x[i]) > T::lit(SUPPORT_CUT) * xmax).collect();
            if support.len() < m {
                support.sort_unstable();
                let sub = ColumnSubset::new(op, support);
                let xs = cgls(&sub, y, T::lit(1e-15).max(T::epsilon()), 20 * sub.cols() + 100);
                targets.push(sub.embed(&xs));
            }
        }
        targets.push(cgls(op, y, T::lit(1e-15).max(T::epsilon()), 20 * m + 100));
        for target in targets {
            if let Some((cand, res)) = restore_feasibility(op, y, epsilon, &x, &target) {
                if !best_feasible || norm1(&cand) < norm1(&best) {
                    best = cand;
                    best_res = res;
                    best_feasible = true;
                }
            }
        }
    }
    if let Some(last) = objective.last_mut() {
        *last = norm1(&best).as_f64();
    }
    Ok(RecoveryResult {
        estimate: best,
        iterations,
        residual: best_res.as_f64(),
        objective,
        converged: converged && best_feasible,
    })
}
