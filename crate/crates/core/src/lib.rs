//! Compressive lensless endoscopy through a multicore fibre.
//!
//! The crate models a fibre with `Q` cores whose random phase sketches
//! illuminate a sample; a single-pixel detector records rank-one
//! projections of the scene's interferometric matrix. It provides the
//! forward models, recovery solvers and a core-field calibration routine.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`.

pub mod calibration;
pub mod error;
pub mod grid;
pub mod hermitian;
pub mod io;
pub mod layout;
pub mod linop;
pub mod measurement;
pub mod rng;
pub mod scalar;
pub mod scene;
pub mod sensing;
pub mod sketch;
pub mod solvers;

pub use error::{Error, Result};
pub use grid::Grid;
pub use hermitian::HermitianMatrix;
pub use layout::CoreLayout;
pub use linop::{DenseOperator, LinearOperator};
pub use measurement::{MeasurementRecord, NoiseDescriptor, NoiseModel, SensingMode};
pub use scalar::Real;
pub use scene::SceneImage;
pub use sensing::{CombinedOperator, InterferometricOperator, SpeckleField, SropOperator};
pub use sketch::SketchBatch;

pub type Grid64 = Grid<f64>;
pub type Grid32 = Grid<f32>;
pub type CoreLayout64 = CoreLayout<f64>;
pub type CoreLayout32 = CoreLayout<f32>;
pub type HermitianMatrix64 = HermitianMatrix<f64>;
pub type HermitianMatrix32 = HermitianMatrix<f32>;
pub type SketchBatch64 = SketchBatch<f64>;
pub type SketchBatch32 = SketchBatch<f32>;
pub type SceneImage64 = SceneImage<f64>;
pub type SceneImage32 = SceneImage<f32>;
pub type CombinedOperator64 = CombinedOperator<f64>;
pub type CombinedOperator32 = CombinedOperator<f32>;
pub type SropOperator64 = SropOperator<f64>;
pub type InterferometricOperator64 = InterferometricOperator<f64>;
pub type MeasurementRecord64 = MeasurementRecord<f64>;
