//! Forward models: interferometric matrix, SROP sketching and the
//! raster-scan and speckle illumination modes.

mod combined;
mod fourier;
mod interferometric;
mod noise;
mod speckle;
mod srop;

pub use combined::CombinedOperator;
pub use fourier::CentredFourier;
pub use interferometric::{interferometric_matrix, interferometric_rank_check, InterferometricOperator, MatrixPath};
pub use noise::add_noise;
pub use speckle::{
    point_spread_function, rs_measure, rs_scan, si_measure, si_sensing_model, speckle, speckle_direct, tilt_sketch,
    SpeckleField,
};
pub use srop::{srop_centered_forward, srop_forward, SropOperator};

use crate::scalar::Real;

/// Subtracts the mean: `y_c = y - mean(y)·1`.
pub fn debias<T: Real>(y: &[T]) -> Vec<T> {
    if y.is_empty() {
        return Vec::new();
    }
    let mean = y.iter().copied().sum::<T>() / T::lit(y.len() as f64);
    y.iter().map(|&v| v - mean).collect()
}
