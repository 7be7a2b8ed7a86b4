//! Additive measurement noise.

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::measurement::NoiseModel;
use crate::rng::rng_from_seed;
use crate::scalar::{norm1, Real};

/// Returns `y + n` and the realised budget `ε = ‖n‖₁`.
pub fn add_noise<T: Real>(y: &[T], model: &NoiseModel, seed: u64) -> Result<(Vec<T>, T)> {
    let mut rng = rng_from_seed(seed);
    let noise: Vec<T> = match *model {
        NoiseModel::None => vec![T::zero(); y.len()],
        NoiseModel::Gaussian { sigma } => {
            if !(sigma >= 0.0) || !sigma.is_finite() {
                return Err(Error::UnknownNoiseModel(format!("gaussian:{sigma}")));
            }
            let d = Normal::new(0.0, sigma).map_err(|e| Error::UnknownNoiseModel(format!("gaussian:{sigma} ({e})")))?;
            (0..y.len()).map(|_| T::lit(d.sample(&mut rng))).collect()
        }
        NoiseModel::Uniform { half_width } => {
            if !(half_width >= 0.0) || !half_width.is_finite() {
                return Err(Error::UnknownNoiseModel(format!("uniform:{half_width}")));
            }
            if half_width == 0.0 {
                vec![T::zero(); y.len()]
            } else {
                let d = Uniform::new_inclusive(-half_width, half_width)
                    .map_err(|e| Error::UnknownNoiseModel(format!("uniform:{half_width} ({e})")))?;
                (0..y.len()).map(|_| T::lit(rng.sample(d))).collect()
            }
        }
    };
    let eps = norm1(&noise);
    Ok((y.iter().zip(&noise).map(|(&a, &n)| a + n).collect(), eps))
}
