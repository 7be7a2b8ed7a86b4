//! Core wavefield calibration by 8-step phase-shifting interferometry, and
//! the generalised sensing model built from calibrated fields.

mod fields;
mod fringes;

pub use fields::{generalized_forward, normalized_cross_correlation, synth_fields, Perturbation, WavefieldSet};
pub use fringes::{recover_fields, render_fringes, FringeStack, PHASE_STEPS, REFERENCE_FLOOR};
