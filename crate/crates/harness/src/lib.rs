//! Experiment orchestration on top of `mcfli-core`: single recovery trials,
//! phase-transition sweeps, RIP-constant estimates, the simulated imaging
//! demo and the calibration round trip. The `mcfli` binary exposes each as a
//! subcommand.

pub mod calibrate;
pub mod demo;
pub mod rip;
pub mod sweep;
pub mod trial;

pub use calibrate::{run_calibration, CalibrationReport, CalibrationRun, CalibrationSpec};
pub use demo::{run_imaging_demo, DemoPoint, DemoReport, DemoSpec, LayoutSummary};
pub use rip::{estimate_rip_constants, exhaustive_pair_extremes, RipEstimate};
pub use sweep::{crossing, run_sweep, slope_through_origin, CellResult, SweepResult, SweepSpec, SWEEP_CSV_HEADER};
pub use trial::{mean_visibilities, run_trial, select_cores, Solver, TrialOutcome, TrialSetup};
