use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Step-size rule for the gradient-type solvers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// Barzilai–Borwein steps with a nonmonotone backtracking safeguard.
    #[default]
    BarzilaiBorwein,
    /// Constant step `1/‖B‖²` (projected gradient) or the default
    /// primal-dual steps.
    Fixed,
}

/// Which of the program parameters is set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Program {
    Lasso { tau: f64 },
    Bpdn { epsilon: f64 },
    Tv { rho: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iterations: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub step_rule: StepRule,
    /// Lasso radius.
    pub tau: Option<f64>,
    /// ℓ1 fidelity budget.
    pub epsilon: Option<f64>,
    /// TV penalty.
    pub rho: Option<f64>,
    pub seed: u64,
    /// Nonmonotone line-search window.
    pub window: usize,
    /// Ratio of primal and dual steps in the primal-dual schemes.
    pub balance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            abs_tol: 1e-14,
            rel_tol: 1e-8,
            step_rule: StepRule::BarzilaiBorwein,
            tau: None,
            epsilon: None,
            rho: None,
            seed: 0,
            window: 10,
            balance: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn lasso(tau: f64) -> Self {
        Self {
            tau: Some(tau),
            ..Self::default()
        }
    }
    pub fn bpdn(epsilon: f64) -> Self {
        Self {
            epsilon: Some(epsilon),
            ..Self::default()
        }
    }
    pub fn tv(rho: f64) -> Self {
        Self {
            rho: Some(rho),
            ..Self::default()
        }
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }
    pub fn with_rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }

    /// Checks tolerances and iteration budget only.
    pub fn check_tolerances(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_iterations == 0 || self.window == 0 || !(self.balance > 0.0) {
            return Err(Error::InvalidArgument(
                "max_iterations, window and balance must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Full validation: tolerances plus exactly one program parameter.
    pub fn program(&self) -> Result<Program> {
        self.check_tolerances()?;
        let set = [self.tau.is_some(), self.epsilon.is_some(), self.rho.is_some()];
        if set.iter().filter(|&&b| b).count() != 1 {
            return Err(Error::InvalidArgument("exactly one of tau, epsilon, rho must be set".into()));
        }
        let p = match (self.tau, self.epsilon, self.rho) {
            (Some(tau), _, _) if tau >= 0.0 => Program::Lasso { tau },
            (_, Some(epsilon), _) if epsilon >= 0.0 => Program::Bpdn { epsilon },
            (_, _, Some(rho)) if rho > 0.0 => Program::Tv { rho },
            _ => return Err(Error::InvalidArgument("program parameter out of range".into())),
        };
        Ok(p)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.program()?;
        Ok(c)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecoveryResult<E> {
    pub estimate: E,
    pub iterations: usize,
    /// Constraint or data-fit value at the returned estimate; see each solver.
    pub residual: f64,
    pub objective: Vec<f64>,
    pub converged: bool,
}

impl<E> RecoveryResult<E> {
    /// Objective trace as CSV with header `iteration,objective`.
    pub fn objective_csv(&self) -> String {
        let mut s = String::from("iteration,objective\n");
        for (i, v) in self.objective.iter().enumerate() {
            let _ = writeln!(s, "{i},{v:e}");
        }
        s
    }

    pub fn map<F, G: FnOnce(E) -> F>(self, f: G) -> RecoveryResult<F> {
        RecoveryResult {
            estimate: f(self.estimate),
            iterations: self.iterations,
            residual: self.residual,
            objective: self.objective,
            converged: self.converged,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_one_parameter() {
        assert_eq!(SolverConfig::lasso(2.0).program().unwrap(), Program::Lasso { tau: 2.0 });
        assert!(SolverConfig::default().program().is_err());
        let both = SolverConfig {
            rho: Some(1.0),
            ..SolverConfig::bpdn(0.1)
        };
        assert!(both.program().is_err());
        let bad = SolverConfig {
            rel_tol: 0.0,
            ..SolverConfig::tv(1.0)
        };
        assert!(bad.program().is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = SolverConfig::from_json(r#"{"epsilon": 0.5, "max_iterations": 300}"#).unwrap();
        assert_eq!(c.program().unwrap(), Program::Bpdn { epsilon: 0.5 });
        assert_eq!(c.max_iterations, 300);
        let back: SolverConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(SolverConfig::from_json(r#"{"tau": 1, "rho": 2}"#).is_err());
        assert!(SolverConfig::from_json(r#"{"tau": 1, "typo": 2}"#).is_err());
    }

    #[test]
    fn objective_csv_has_header() {
        let r = RecoveryResult {
            estimate: (),
            iterations: 2,
            residual: 0.0,
            objective: vec![1.0, 0.5],
            converged: true,
        };
        let csv = r.objective_csv();
        assert!(csv.starts_with("iteration,objective\n0,1e0\n1,5e-1"));
    }
}
