//! Recovery programs for sparse images and interferometric matrices.

mod bpdn;
mod cgls;
mod config;
mod l1;
mod lasso;
mod metrics;
mod nyquist;
mod psd;
mod tv;

pub use bpdn::solve_bpdn_l1;
pub use cgls::{cgls, ColumnSubset};
pub use config::{Program, RecoveryResult, SolverConfig, StepRule};
pub use l1::{project_l1_ball, soft_threshold};
pub use lasso::solve_lasso;
pub use metrics::{snr_db, vignetted_snr, SNR_CAP_DB};
pub use nyquist::{nyquist_recover, NyquistSketchSet};
pub use psd::{solve_trace_min_psd, PackedSrop};
pub use tv::{solve_tv_nonneg, Gradient2d};
