//! Monte-Carlo phase-transition sweeps over `(K, Q, M)`.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mcfli_core::rng::{child_seed, labelled_seed};
use mcfli_core::solvers::SolverConfig;
use mcfli_core::Grid;

use crate::trial::{run_trial, select_cores, Solver, TrialOutcome, TrialSetup};

/// Sweep description. The core axis is given either as explicit core counts
/// (`q`) or as mean-visibility targets (`visibility_targets`), each resolved
/// to the core count whose mean `|V0|` is closest to the target.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub grid: Grid<f64>,
    pub k: Vec<usize>,
    pub q: Vec<usize>,
    pub visibility_targets: Vec<f64>,
    pub m: Vec<usize>,
    pub trials: usize,
    pub threshold_db: f64,
    pub master_seed: u64,
    pub solver: Solver,
    pub config: SolverConfig,
    /// Layout draws used when resolving a visibility target.
    pub selection_samples: usize,
    pub output: Option<PathBuf>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            grid: Grid::unit(1, 256).expect("valid default grid"),
            k: vec![2, 4, 8],
            q: Vec::new(),
            visibility_targets: vec![240.0],
            m: vec![8, 16, 24, 32, 48, 64, 96, 128],
            trials: 80,
            threshold_db: 40.0,
            master_seed: 0,
            solver: Solver::Lasso,
            config: SolverConfig::default(),
            selection_samples: 200,
            output: None,
        }
    }
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).context("parsing sweep spec")?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(!self.k.is_empty(), "K range is empty");
        ensure!(!self.m.is_empty(), "M range is empty");
        ensure!(
            self.q.is_empty() != self.visibility_targets.is_empty(),
            "give exactly one of `q` or `visibility_targets`"
        );
        ensure!(self.trials >= 1, "need at least one trial per cell");
        ensure!(self.threshold_db > 0.0, "success threshold must be positive");
        ensure!(self.q.iter().all(|&q| q >= 2), "every Q must be at least 2");
        ensure!(self.m.iter().all(|&m| m >= 1), "every M must be at least 1");
        ensure!(
            self.k.iter().all(|&k| k <= self.grid.len()),
            "K exceeds the grid size {}",
            self.grid.len()
        );
        self.config.check_tolerances()?;
        Ok(())
    }

    fn setup(&self) -> TrialSetup {
        TrialSetup {
            grid: self.grid.clone(),
            solver: self.solver,
            config: self.config.clone(),
            threshold_db: self.threshold_db,
        }
    }
}

/// Aggregated trials of one `(K, Q, M)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub k: usize,
    pub q: usize,
    pub m: usize,
    /// Visibility target that selected `q`, if the sweep was target-driven.
    pub visibility_target: Option<f64>,
    pub trials: usize,
    pub success_rate: f64,
    pub mean_visibilities: f64,
    pub std_visibilities: f64,
    pub mean_snr_db: f64,
    pub mean_iterations: f64,
}

impl CellResult {
    fn aggregate(k: usize, q: usize, m: usize, target: Option<f64>, outcomes: &[TrialOutcome]) -> Self {
        let n = outcomes.len() as f64;
        let successes = outcomes.iter().filter(|o| o.success).count();
        let mean_v = outcomes.iter().map(|o| o.visibilities as f64).sum::<f64>() / n;
        let var_v = outcomes
            .iter()
            .map(|o| (o.visibilities as f64 - mean_v).powi(2))
            .sum::<f64>()
            / n;
        Self {
            k,
            q,
            m,
            visibility_target: target,
            trials: outcomes.len(),
            success_rate: successes as f64 / n,
            mean_visibilities: mean_v,
            std_visibilities: var_v.sqrt(),
            mean_snr_db: outcomes.iter().map(|o| o.snr_db).sum::<f64>() / n,
            mean_iterations: outcomes.iter().map(|o| o.iterations as f64).sum::<f64>() / n,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub cells: Vec<CellResult>,
}

/// CSV columns, in order.
pub const SWEEP_CSV_HEADER: [&str; 10] = [
    "k",
    "q",
    "m",
    "visibility_target",
    "trials",
    "success_rate",
    "mean_visibilities",
    "std_visibilities",
    "mean_snr_db",
    "mean_iterations",
];

impl SweepResult {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(SWEEP_CSV_HEADER)?;
        for c in &self.cells {
            out.write_record([
                c.k.to_string(),
                c.q.to_string(),
                c.m.to_string(),
                c.visibility_target.map(|t| t.to_string()).unwrap_or_default(),
                c.trials.to_string(),
                c.success_rate.to_string(),
                c.mean_visibilities.to_string(),
                c.std_visibilities.to_string(),
                c.mean_snr_db.to_string(),
                c.mean_iterations.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Cells of one `(K, Q)` column ordered by `M`.
    pub fn column(&self, k: usize, q: usize) -> Vec<&CellResult> {
        let mut cells: Vec<_> = self.cells.iter().filter(|c| c.k == k && c.q == q).collect();
        cells.sort_by_key(|c| c.m);
        cells
    }
}

/// Runs every cell; the result does not depend on the thread count.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let setup = spec.setup();
    let qs: Vec<(usize, Option<f64>)> = if spec.q.is_empty() {
        spec.visibility_targets
            .iter()
            .map(|&t| {
                let seed = labelled_seed(spec.master_seed, &format!("select-{t}"));
                select_cores(&spec.grid, t, spec.selection_samples.max(1), seed).map(|(q, _, _)| (q, Some(t)))
            })
            .collect::<Result<_>>()?
    } else {
        spec.q.iter().map(|&q| (q, None)).collect()
    };

    let mut cells = Vec::new();
    for &k in &spec.k {
        for &(q, target) in &qs {
            for &m in &spec.m {
                cells.push((k, q, m, target));
            }
        }
    }
    let jobs: Vec<(usize, u64)> = cells
        .iter()
        .enumerate()
        .flat_map(|(c, &(k, q, m, _))| {
            let cell_seed = labelled_seed(spec.master_seed, &format!("k{k}-q{q}-m{m}"));
            (0..spec.trials).map(move |t| (c, child_seed(cell_seed, t as u64)))
        })
        .collect();
    let outcomes: Vec<TrialOutcome> = jobs
        .par_iter()
        .map(|&(c, seed)| {
            let (k, q, m, _) = cells[c];
            run_trial(&setup, k, q, m, seed)
        })
        .collect::<Result<_>>()?;

    let cells = cells
        .iter()
        .zip(outcomes.chunks(spec.trials))
        .map(|(&(k, q, m, target), chunk)| CellResult::aggregate(k, q, m, target, chunk))
        .collect();
    let result = SweepResult {
        spec: spec.clone(),
        cells,
    };
    if let Some(path) = &spec.output {
        result.save_csv(path)?;
    }
    Ok(result)
}

/// First upward crossing of `level` along `(x, rate)` points sorted by `x`,
/// linearly interpolated. `None` if the curve never reaches `level`; the
/// first abscissa if it starts at or above it.
pub fn crossing(points: &[(f64, f64)], level: f64) -> Option<f64> {
    let first = points.first()?;
    if first.1 >= level {
        return Some(first.0);
    }
    points.windows(2).find_map(|w| {
        let ((x0, r0), (x1, r1)) = (w[0], w[1]);
        (r0 < level && r1 >= level).then(|| x0 + (level - r0) * (x1 - x0) / (r1 - r0))
    })
}

/// Least-squares slope through the origin of `x ≈ C · K`.
pub fn slope_through_origin(points: &[(f64, f64)]) -> Option<f64> {
    let kk: f64 = points.iter().map(|(k, _)| k * k).sum();
    (kk > 0.0).then(|| points.iter().map(|(k, x)| k * x).sum::<f64>() / kk)
}
