//! Simulated lensless imaging of a 2-D scene with a Fermat-spiral fiber.
//!
//! For each core subsampling and each `M`, the scene is sensed by the
//! vignetted operator `B`, reconstructed by TV-regularised nonnegative least
//! squares over a logarithmic sweep of `ρ`, and scored by vignetted SNR.
//! A raster-scan image of the same scene is produced for comparison.

use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use serde::{Deserialize, Serialize};

use mcfli_core::calibration::normalized_cross_correlation;
use mcfli_core::io::{read_real_array, save_pgm, write_real_array};
use mcfli_core::layout::fermat_spiral_layout;
use mcfli_core::rng::labelled_seed;
use mcfli_core::scalar::norm_inf;
use mcfli_core::scene::gaussian_vignette;
use mcfli_core::sensing::rs_scan;
use mcfli_core::sketch::draw_sketches;
use mcfli_core::solvers::{solve_tv_nonneg, vignetted_snr, SolverConfig};
use mcfli_core::{CombinedOperator, CoreLayout, Grid, LinearOperator, SceneImage};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemoSpec {
    /// Pixels per side.
    pub n1: usize,
    /// Real binary array of shape `[n1, n1]`; the two-rectangle cartoon if absent.
    pub scene: Option<PathBuf>,
    /// Cores on the full spiral.
    pub cores: usize,
    /// Spiral diameter in core-pitch units.
    pub diameter: f64,
    /// Keep every `s`-th core, one layout per entry.
    pub subsample: Vec<usize>,
    /// Gaussian vignette width as a fraction of the field of view.
    pub vignette_width: f64,
    pub m: Vec<usize>,
    /// `ρ` candidates as multiples of `‖Bᵀy‖∞ / M`.
    pub rho_factors: Vec<f64>,
    /// Number of largest-`M` points averaged into the plateau SNR.
    pub plateau_points: usize,
    pub max_iterations: usize,
    pub rel_tol: f64,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl Default for DemoSpec {
    fn default() -> Self {
        Self {
            n1: 64,
            scene: None,
            cores: 110,
            diameter: 30.0,
            subsample: vec![1, 2],
            vignette_width: 0.3,
            m: vec![250, 500, 1000, 2000, 3000],
            rho_factors: vec![1e-3, 1e-2, 1e-1],
            plateau_points: 2,
            max_iterations: 400,
            rel_tol: 1e-6,
            seed: 0,
            output: None,
        }
    }
}

impl DemoSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).context("parsing demo spec")?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(!self.m.is_empty() && self.m.iter().all(|&m| m >= 1), "M list must be nonempty and positive");
        ensure!(!self.subsample.is_empty() && self.subsample.iter().all(|&s| s >= 1), "bad subsampling list");
        ensure!(
            !self.rho_factors.is_empty() && self.rho_factors.iter().all(|&r| r > 0.0),
            "rho factors must be positive"
        );
        ensure!((1..=self.m.len()).contains(&self.plateau_points), "plateau_points out of range");
        ensure!(self.cores >= 2, "need at least two cores");
        ensure!(self.vignette_width > 0.0, "vignette width must be positive");
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoPoint {
    pub cores: usize,
    pub m: usize,
    pub rho: f64,
    pub snr_db: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutSummary {
    pub cores: usize,
    pub visibilities: usize,
    pub plateau_snr_db: f64,
    /// Pearson correlation of the raster-scan image with the vignetted scene.
    pub raster_correlation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    /// Best-`ρ` point for every `(layout, M)`.
    pub points: Vec<DemoPoint>,
    pub layouts: Vec<LayoutSummary>,
}

impl DemoReport {
    pub fn plateau(&self, cores: usize) -> Option<f64> {
        self.layouts.iter().find(|l| l.cores == cores).map(|l| l.plateau_snr_db)
    }
}

fn load_scene(grid: &Grid<f64>, path: Option<&Path>) -> Result<SceneImage<f64>> {
    match path {
        None => Ok(SceneImage::cartoon_rectangles(grid)?),
        Some(p) => {
            let mut f = std::io::BufReader::new(std::fs::File::open(p).with_context(|| format!("opening {}", p.display()))?);
            let (dims, values) = read_real_array::<_, f64>(&mut f)?;
            ensure!(dims == [grid.n1(), grid.n1()], "scene dims {dims:?} do not match {0}x{0}", grid.n1());
            Ok(SceneImage::from_values(grid, values)?)
        }
    }
}

pub fn save_real_array(path: &Path, dims: &[usize], data: &[f64]) -> Result<()> {
    use std::io::Write;
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?);
    write_real_array(&mut f, dims, data)?;
    f.flush()?;
    Ok(())
}

fn save_image(dir: &Path, stem: &str, n1: usize, data: &[f64]) -> Result<()> {
    save_pgm(&dir.join(format!("{stem}.pgm")), n1, n1, data)?;
    save_real_array(&dir.join(format!("{stem}.bin")), &[n1, n1], data)
}

/// Raster scan with one spot per pixel position.
pub fn raster_image(scene: &SceneImage<f64>, layout: &CoreLayout<f64>) -> Result<Vec<f64>> {
    let grid = layout.grid();
    let path: Vec<[f64; 2]> = (0..grid.len()).map(|i| grid.pixel_position(i)).collect();
    Ok(rs_scan(scene, layout, &path)?)
}

pub fn run_imaging_demo(spec: &DemoSpec) -> Result<DemoReport> {
    spec.validate()?;
    let grid = Grid::unit(2, spec.n1)?;
    let n1 = spec.n1;
    let scene = load_scene(&grid, spec.scene.as_deref())?;
    let w = gaussian_vignette(&grid, spec.vignette_width);
    let vignetted_scene = scene.clone().with_vignette(w.clone())?;
    let truth_w = vignetted_scene.vignetted();
    let full = fermat_spiral_layout(&grid, spec.cores, spec.diameter)?.snapped();
    if let Some(dir) = &spec.output {
        std::fs::create_dir_all(dir)?;
        save_image(dir, "truth", n1, &scene.values)?;
        save_image(dir, "truth_vignetted", n1, &truth_w)?;
    }

    let mut points = Vec::new();
    let mut layouts = Vec::new();
    for &step in &spec.subsample {
        let layout = full.subsample(step)?;
        let q = layout.cores();
        let raster = raster_image(&vignetted_scene, &layout)?;
        let mut curve = Vec::new();
        for &m in &spec.m {
            let sketches = draw_sketches(q, m, labelled_seed(spec.seed, &format!("sketches-q{q}-m{m}")), None)?;
            let b = CombinedOperator::new(layout.clone(), &sketches)?
                .with_vignette(w.clone())?
                .to_dense();
            let y = b.apply(&scene.values);
            let scale = norm_inf(&b.apply_adjoint(&y)) / m as f64;
            let mut best: Option<(DemoPoint, Vec<f64>)> = None;
            for &factor in &spec.rho_factors {
                let rho = factor * scale;
                let config = SolverConfig::tv(rho)
                    .with_max_iterations(spec.max_iterations)
                    .with_rel_tol(spec.rel_tol);
                let r = solve_tv_nonneg(&b, &y, rho, &config)?;
                let snr = vignetted_snr(&r.estimate, &scene.values, &w)?;
                if best.as_ref().is_none_or(|(p, _)| snr > p.snr_db) {
                    let point = DemoPoint {
                        cores: q,
                        m,
                        rho,
                        snr_db: snr,
                        iterations: r.iterations,
                        converged: r.converged,
                    };
                    best = Some((point, r.estimate));
                }
            }
            let (point, estimate) = best.expect("at least one rho");
            if let Some(dir) = &spec.output {
                save_image(dir, &format!("estimate_q{q}_m{m}"), n1, &estimate)?;
            }
            curve.push(point.snr_db);
            points.push(point);
        }
        let tail = &curve[curve.len() - spec.plateau_points..];
        let plateau = tail.iter().sum::<f64>() / tail.len() as f64;
        if let Some(dir) = &spec.output {
            save_image(dir, &format!("raster_q{q}"), n1, &raster)?;
        }
        layouts.push(LayoutSummary {
            cores: q,
            visibilities: layout.distinct_visibilities(),
            plateau_snr_db: plateau,
            raster_correlation: normalized_cross_correlation(&raster, &truth_w),
        });
    }
    let report = DemoReport { points, layouts };
    if let Some(dir) = &spec.output {
        write_points_csv(&dir.join("snr.csv"), &report.points)?;
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    }
    Ok(report)
}

/// Columns: `cores,m,rho,snr_db,iterations,converged`.
pub fn write_points_csv(path: &Path, points: &[DemoPoint]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}
