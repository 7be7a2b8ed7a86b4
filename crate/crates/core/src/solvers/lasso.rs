//! `min ½‖y - Bx‖²  s.t.  ‖x‖₁ ≤ τ` by spectral projected gradient.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linop::{operator_norm_sq, LinearOperator};
use crate::scalar::{dot, norm2, norm_inf, Real};

use super::config::{RecoveryResult, SolverConfig, StepRule};
use super::l1::project_l1_ball;

/// Sufficient-decrease constant of the nonmonotone line search.
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

pub(crate) fn check_data<T: Real, O: LinearOperator<T> + ?Sized>(op: &O, y: &[T]) -> Result<()> {
    if y.len() != op.rows() {
        return Err(Error::MeasurementCount {
            expected: op.rows(),
            got: y.len(),
        });
    }
    Ok(())
}

/// Stops on a duality gap `‖r‖² - ⟨y, r⟩ + τ‖Bᵀr‖∞ ≤ abs_tol + rel_tol·f`
/// or when the fixed-step projected-gradient map moves the iterate by
/// less than `rel_tol·‖x‖`. `residual` is `‖y - Bx̃‖₂`.
pub fn solve_lasso<T: Real, O: LinearOperator<T> + ?Sized>(
    op: &O,
    y: &[T],
    tau: T,
    config: &SolverConfig,
) -> Result<RecoveryResult<Vec<T>>> {
    config.check_tolerances()?;
    check_data(op, y)?;
    if !(tau >= T::zero()) {
        return Err(Error::InvalidArgument("lasso radius must be nonnegative".into()));
    }
    let n = op.cols();
    let mut x = vec![T::zero(); n];
    let y_norm = norm2(y);
    if tau == T::zero() || y_norm == T::zero() {
        return Ok(RecoveryResult {
            estimate: x,
            iterations: 0,
            residual: y_norm.as_f64(),
            objective: vec![(y_norm * y_norm).as_f64() * 0.5],
            converged: true,
        });
    }
    let lip = operator_norm_sq(op, 200, config.seed);
    if lip == T::zero() {
        return Ok(RecoveryResult {
            estimate: x,
            iterations: 0,
            residual: y_norm.as_f64(),
            objective: vec![(y_norm * y_norm).as_f64() * 0.5],
            converged: true,
        });
    }
    let step0 = T::one() / lip;
    let (step_min, step_max) = (step0 * T::lit(1e-10), step0 * T::lit(1e10));
    let half = T::lit(0.5);
    let abs_tol = T::lit(config.abs_tol);
    let rel_tol = T::lit(config.rel_tol);

    let mut r = y.to_vec();
    let mut f = half * dot(&r, &r);
    let mut g: Vec<T> = op.apply_adjoint(&r).into_iter().map(|v| -v).collect();
    let mut step = step0;
    let mut history: VecDeque<T> = VecDeque::with_capacity(config.window);
    history.push_back(f);
    let mut objective = vec![f.as_f64()];
    let mut converged = false;
    let mut iterations = 0;

    for it in 0..config.max_iterations {
        let gap = dot(&r, &r) - dot(y, &r) + tau * norm_inf(&g);
        let probe: Vec<T> = x.iter().zip(&g).map(|(&a, &b)| a - step0 * b).collect();
        let probe = project_l1_ball(&probe, tau);
        let moved: Vec<T> = probe.iter().zip(&x).map(|(&a, &b)| a - b).collect();
        if gap <= abs_tol + rel_tol * f || norm2(&moved) <= rel_tol * norm2(&x) {
            converged = true;
            iterations = it;
            break;
        }

        let trial: Vec<T> = x.iter().zip(&g).map(|(&a, &b)| a - step * b).collect();
        let d: Vec<T> = project_l1_ball(&trial, tau).iter().zip(&x).map(|(&a, &b)| a - b).collect();
        let bd = op.apply(&d);
        let gd = dot(&g, &d);
        let f_ref = history.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
        let mut lambda = T::one();
        let mut r_new: Vec<T>;
        let mut f_new;
        let mut tries = 0;
        loop {
            r_new = r.iter().zip(&bd).map(|(&a, &b)| a - lambda * b).collect();
            f_new = half * dot(&r_new, &r_new);
            if f_new <= f_ref + T::lit(ARMIJO) * lambda * gd || tries >= MAX_BACKTRACKS {
                break;
            }
            lambda = lambda * half;
            tries += 1;
        }
        let x_new: Vec<T> = x.iter().zip(&d).map(|(&a, &b)| a + lambda * b).collect();
        let g_new: Vec<T> = op.apply_adjoint(&r_new).into_iter().map(|v| -v).collect();

        step = match config.step_rule {
            StepRule::Fixed => step0,
            StepRule::BarzilaiBorwein => {
                let s: Vec<T> = d.iter().map(|&v| v * lambda).collect();
                let yk: Vec<T> = g_new.iter().zip(&g).map(|(&a, &b)| a - b).collect();
                let sty = dot(&s, &yk);
                if sty <= T::zero() {
                    step_max
                } else {
                    (dot(&s, &s) / sty).max(step_min).min(step_max)
                }
            }
        };
        x = x_new;
        r = r_new;
        g = g_new;
        f = f_new;
        if history.len() == config.window {
            history.pop_front();
        }
        history.push_back(f);
        objective.push(f.as_f64());
        iterations = it + 1;
    }

    let bx = op.apply(&x);
    let res: Vec<T> = y.iter().zip(&bx).map(|(&a, &b)| a - b).collect();
    Ok(RecoveryResult {
        estimate: x,
        iterations,
        residual: norm2(&res).as_f64(),
        objective,
        converged,
    })
}
