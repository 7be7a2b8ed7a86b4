//! Synthetic calibration round trip: fields, phase-shifted fringes,
//! recovered fields and the speckle patterns they predict.

use std::path::PathBuf;

use anyhow::{ensure, Context, Result};
use serde::{Deserialize, Serialize};

use mcfli_core::calibration::{normalized_cross_correlation, recover_fields, render_fringes, synth_fields, Perturbation};
use mcfli_core::layout::fermat_spiral_layout;
use mcfli_core::rng::labelled_seed;
use mcfli_core::scene::gaussian_vignette;
use mcfli_core::sketch::draw_sketches;
use mcfli_core::Grid;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSpec {
    pub n1: usize,
    pub cores: usize,
    pub diameter: f64,
    pub perturbation: Perturbation,
    pub vignette_width: f64,
    /// Relative frame noise levels, one round trip each.
    pub noise: Vec<f64>,
    /// Random sketches used to compare predicted and true speckle.
    pub sketches: usize,
    pub seed: u64,
    /// Directory receiving fringe stacks and recovered fields.
    pub output: Option<PathBuf>,
}

impl Default for CalibrationSpec {
    fn default() -> Self {
        Self {
            n1: 32,
            cores: 20,
            diameter: 12.0,
            perturbation: Perturbation::PhaseAberration { delta: 1.0 },
            vignette_width: 0.3,
            noise: vec![0.0, 0.01],
            sketches: 20,
            seed: 0,
            output: None,
        }
    }
}

impl CalibrationSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).context("parsing calibration spec")?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.cores >= 1, "need at least one core");
        ensure!(self.sketches >= 1, "need at least one sketch");
        ensure!(!self.noise.is_empty(), "noise list is empty");
        ensure!(self.vignette_width > 0.0, "vignette width must be positive");
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRun {
    pub noise: f64,
    pub min_correlation: f64,
    pub mean_correlation: f64,
    pub masked_pixels: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub cores: usize,
    pub frames: usize,
    pub runs: Vec<CalibrationRun>,
}

pub fn run_calibration(spec: &CalibrationSpec) -> Result<CalibrationReport> {
    spec.validate()?;
    let grid = Grid::unit(2, spec.n1)?;
    let layout = fermat_spiral_layout(&grid, spec.cores, spec.diameter)?;
    let w = gaussian_vignette(&grid, spec.vignette_width);
    let truth = synth_fields(&layout, spec.perturbation).with_vignette(&w)?;
    let sketches = draw_sketches::<f64>(spec.cores, spec.sketches, labelled_seed(spec.seed, "probe-sketches"), None)?;
    let true_speckle: Vec<Vec<f64>> = sketches.rows().map(|a| truth.speckle(a)).collect::<Result<_, _>>()?;

    let mut runs = Vec::new();
    let mut frames = 0;
    for (i, &sigma) in spec.noise.iter().enumerate() {
        let stack = render_fringes(&truth, sigma, labelled_seed(spec.seed, &format!("fringes-{i}")))?;
        frames = stack.frame_count();
        let recovered = recover_fields(&stack)?;
        let masked = recovered
            .field(0)
            .iter()
            .filter(|z| z.norm_sqr() == 0.0)
            .count();
        let scores: Vec<f64> = sketches
            .rows()
            .zip(&true_speckle)
            .map(|(a, s)| Ok(normalized_cross_correlation(&recovered.speckle(a)?, s)))
            .collect::<Result<_>>()?;
        if let Some(dir) = &spec.output {
            let sub = dir.join(format!("noise_{i}"));
            stack.export(&sub)?;
            recovered.save(&sub.join("recovered_fields.bin"))?;
        }
        runs.push(CalibrationRun {
            noise: sigma,
            min_correlation: scores.iter().copied().fold(f64::INFINITY, f64::min),
            mean_correlation: scores.iter().sum::<f64>() / scores.len() as f64,
            masked_pixels: masked,
        });
    }
    let report = CalibrationReport {
        cores: spec.cores,
        frames,
        runs,
    };
    if let Some(dir) = &spec.output {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    }
    Ok(report)
}
