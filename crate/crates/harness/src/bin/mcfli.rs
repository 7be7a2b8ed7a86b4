use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use mcfli_core::Grid;
use mcfli_harness::{
    estimate_rip_constants, run_calibration, run_imaging_demo, run_sweep, run_trial, CalibrationSpec, DemoSpec,
    SweepSpec, TrialSetup,
};

/// Multicore-fiber lensless imaging experiments.
#[derive(Parser)]
#[command(name = "mcfli", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON configuration for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (CSV) or directory (images), depending on the subcommand.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; all cores by default.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Phase-transition sweep over (K, Q, M); one CSV row per cell.
    Sweep {
        #[arg(long)]
        trials: Option<usize>,
        /// Success threshold in dB.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// A single recovery trial.
    Trial {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Empirical RIP constants of the debiased operator.
    Rip {
        #[arg(long)]
        k0: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Simulated imaging with TV reconstruction and raster-scan comparison.
    Demo,
    /// Synthetic calibration round trip.
    Calibrate,
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RipSpec {
    grid: Grid<f64>,
    k0: usize,
    q: usize,
    m: usize,
    trials: usize,
    seed: u64,
}

impl Default for RipSpec {
    fn default() -> Self {
        Self {
            grid: Grid::unit(1, 256).expect("valid default grid"),
            k0: 4,
            q: 26,
            m: 64,
            trials: 200,
            seed: 0,
        }
    }
}

fn read_config<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
    }
}

/// CSV goes to `--out` when given, stdout otherwise.
fn csv_sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let c = &cli.common;
    if let Some(n) = c.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let config = c.config.as_deref();
    match cli.command {
        Command::Sweep { trials, threshold } => {
            let mut spec: SweepSpec = read_config(config)?;
            if let Some(s) = c.seed {
                spec.master_seed = s;
            }
            if let Some(t) = trials {
                spec.trials = t;
            }
            if let Some(t) = threshold {
                spec.threshold_db = t;
            }
            spec.output = None;
            let result = run_sweep(&spec)?;
            result.write_csv(csv_sink(c.out.as_deref())?)?;
        }
        Command::Trial { k, q, m, threshold } => {
            let mut setup: TrialSetup = read_config(config)?;
            if let Some(t) = threshold {
                setup.threshold_db = t;
            }
            let seed = c.seed.unwrap_or(0);
            let o = run_trial(&setup, k, q, m, seed)?;
            let mut w = csv::Writer::from_writer(csv_sink(c.out.as_deref())?);
            w.write_record(["k", "q", "m", "seed", "snr_db", "success", "visibilities", "iterations"])?;
            w.write_record([
                k.to_string(),
                q.to_string(),
                m.to_string(),
                seed.to_string(),
                o.snr_db.to_string(),
                o.success.to_string(),
                o.visibilities.to_string(),
                o.iterations.to_string(),
            ])?;
            w.flush()?;
        }
        Command::Rip { k0, q, m, trials } => {
            let mut spec: RipSpec = read_config(config)?;
            spec.k0 = k0.unwrap_or(spec.k0);
            spec.q = q.unwrap_or(spec.q);
            spec.m = m.unwrap_or(spec.m);
            spec.trials = trials.unwrap_or(spec.trials);
            spec.seed = c.seed.unwrap_or(spec.seed);
            let r = estimate_rip_constants(&spec.grid, spec.k0, spec.q, spec.m, spec.trials, spec.seed)?;
            let mut w = csv::Writer::from_writer(csv_sink(c.out.as_deref())?);
            w.serialize(&r)?;
            w.flush()?;
        }
        Command::Demo => {
            let mut spec: DemoSpec = read_config(config)?;
            spec.seed = c.seed.unwrap_or(spec.seed);
            spec.output = c.out.clone().or(spec.output);
            let report = run_imaging_demo(&spec)?;
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            for p in &report.points {
                w.serialize(p)?;
            }
            w.flush()?;
            for l in &report.layouts {
                eprintln!(
                    "Q={} |V0|={} plateau SNR {:.2} dB, raster correlation {:.3}",
                    l.cores, l.visibilities, l.plateau_snr_db, l.raster_correlation
                );
            }
        }
        Command::Calibrate => {
            let mut spec: CalibrationSpec = read_config(config)?;
            spec.seed = c.seed.unwrap_or(spec.seed);
            spec.output = c.out.clone().or(spec.output);
            let report = run_calibration(&spec)?;
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            for r in &report.runs {
                w.serialize(r)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
