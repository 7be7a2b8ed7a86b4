//! Sample images on a grid.

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::rng::rng_from_seed;
use crate::scalar::Real;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct SceneImage<T> {
    pub grid: Grid<T>,
    pub values: Vec<T>,
    /// Vignetting window `w`; `None` means `w ≡ 1`.
    #[serde(default)]
    pub vignette: Option<Vec<T>>,
    /// Sparsity level of a synthetic sparse scene.
    #[serde(default)]
    pub sparsity: Option<usize>,
    #[serde(default)]
    pub support: Vec<usize>,
    #[serde(default)]
    pub zero_mean: bool,
}

impl<T: Real> SceneImage<T> {
    pub fn zeros(grid: &Grid<T>) -> Self {
        Self {
            values: vec![T::zero(); grid.len()],
            grid: grid.clone(),
            vignette: None,
            sparsity: None,
            support: Vec::new(),
            zero_mean: false,
        }
    }

    pub fn from_values(grid: &Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
                context: "scene values",
            });
        }
        Ok(Self {
            values,
            ..Self::zeros(grid)
        })
    }

    /// Dirac spikes on grid pixels.
    pub fn spikes(grid: &Grid<T>, pixels: &[usize], amplitudes: &[T]) -> Result<Self> {
        if pixels.len() != amplitudes.len() {
            return Err(Error::InvalidArgument("one amplitude per spike is required".into()));
        }
        let mut s = Self::zeros(grid);
        for (&p, &a) in pixels.iter().zip(amplitudes) {
            if p >= grid.len() {
                return Err(Error::InvalidArgument(format!("pixel {p} outside the grid")));
            }
            s.values[p] = s.values[p] + a;
        }
        s.sparsity = Some(pixels.len());
        s.support = pixels.to_vec();
        s.support.sort_unstable();
        s.support.dedup();
        Ok(s)
    }

    /// `K`-sparse scene with uniform random support and i.i.d. standard
    /// normal values from which their mean is subtracted.
    pub fn sparse_zero_mean(grid: &Grid<T>, k: usize, seed: u64) -> Result<Self> {
        if k > grid.len() {
            return Err(Error::InvalidArgument(format!("K = {k} exceeds N = {}", grid.len())));
        }
        let mut rng = rng_from_seed(seed);
        let mut support: Vec<usize> = index::sample(&mut rng, grid.len(), k).into_vec();
        let raw: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let mean = if k == 0 { 0.0 } else { raw.iter().sum::<f64>() / k as f64 };
        let mut s = Self::zeros(grid);
        for (&p, &v) in support.iter().zip(&raw) {
            s.values[p] = T::lit(v - mean);
        }
        support.sort_unstable();
        s.support = support;
        s.sparsity = Some(k);
        s.zero_mean = true;
        Ok(s)
    }

    /// Binary cartoon: two axis-aligned rectangles on a zero background,
    /// both inside the central half of the field of view.
    pub fn cartoon_rectangles(grid: &Grid<T>) -> Result<Self> {
        if grid.dim() != 2 {
            return Err(Error::InvalidArgument("cartoon scene needs a 2-D grid".into()));
        }
        let n = grid.n1();
        let frac = |x: f64| ((x * n as f64).round() as usize).min(n);
        let rects = [
            (frac(0.30), frac(0.46), frac(0.28), frac(0.70), 1.0),
            (frac(0.54), frac(0.72), frac(0.40), frac(0.58), 0.7),
        ];
        let mut s = Self::zeros(grid);
        for &(r0, r1, c0, c1, v) in &rects {
            for r in r0..r1 {
                for c in c0..c1 {
                    s.values[r * n + c] = T::lit(v);
                }
            }
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn with_vignette(mut self, w: Vec<T>) -> Result<Self> {
        if w.len() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                got: w.len(),
                context: "vignette",
            });
        }
        self.vignette = Some(w);
        Ok(self)
    }

    /// `f° = w ⊙ f`.
    pub fn vignetted(&self) -> Vec<T> {
        match &self.vignette {
            Some(w) => self.values.iter().zip(w).map(|(&f, &w)| f * w).collect(),
            None => self.values.clone(),
        }
    }

    pub fn sum(&self) -> T {
        self.values.iter().copied().sum()
    }
}

/// Gaussian vignetting window `exp(-|x|² / (2 s²))` with `s = width · L`.
pub fn gaussian_vignette<T: Real>(grid: &Grid<T>, width: T) -> Vec<T> {
    let s = width * grid.fov();
    let two_s2 = T::lit(2.0) * s * s;
    (0..grid.len())
        .map(|i| {
            let [x, y] = grid.pixel_position(i);
            (-(x * x + y * y) / two_s2).exp()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_scene_properties() {
        let g = Grid::<f64>::unit(1, 256).unwrap();
        let s = SceneImage::sparse_zero_mean(&g, 7, 4).unwrap();
        assert!(s.sum().abs() < 1e-12);
        assert!(s.support.len() <= 7);
        let nnz = s.values.iter().filter(|&&v| v != 0.0).count();
        assert!(nnz <= 7);
        let again = SceneImage::sparse_zero_mean(&g, 7, 4).unwrap();
        assert_eq!(s.values, again.values);
        assert!(SceneImage::sparse_zero_mean(&g, 300, 4).is_err());
        let zero = SceneImage::sparse_zero_mean(&g, 0, 4).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cartoon_and_vignette() {
        let g = Grid::<f64>::unit(2, 64).unwrap();
        let s = SceneImage::cartoon_rectangles(&g).unwrap();
        assert!(s.values.iter().all(|&v| v >= 0.0));
        assert!(s.sum() > 100.0);
        let w = gaussian_vignette(&g, 0.25);
        assert!((w[32 * 64 + 32] - 1.0).abs() < 1e-15);
        let v = s.clone().with_vignette(w).unwrap();
        assert!(v.vignetted().iter().zip(&s.values).all(|(a, b)| a <= b));
    }
}
