//! Random unit-modulus sketching vectors.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::scalar::{cis, Real};

/// `M` sketches `α_m ∈ C^Q` with i.i.d. uniform phases, stored as phases.
#[derive(Clone, Debug)]
pub struct SketchBatch<T> {
    q: usize,
    m: usize,
    seed: u64,
    quant_bits: Option<u32>,
    phases: Vec<T>,
    values: Vec<Complex<T>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct SketchFile<T> {
    pub distribution: String,
    pub cores: usize,
    pub count: usize,
    pub seed: u64,
    pub quant_bits: Option<u32>,
    pub phases: Vec<T>,
    pub entries: Vec<[T; 2]>,
}

impl<T: Real> Serialize for SketchBatch<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SketchFile {
            distribution: "uniform-phase".into(),
            cores: self.q,
            count: self.m,
            seed: self.seed,
            quant_bits: self.quant_bits,
            phases: self.phases.clone(),
            entries: self.values.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for SketchBatch<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = SketchFile::<T>::deserialize(d)?;
        SketchBatch::from_phases(f.cores, f.phases, f.seed, f.quant_bits).map_err(serde::de::Error::custom)
    }
}

impl<T: Real> SketchBatch<T> {
    pub fn from_phases(q: usize, phases: Vec<T>, seed: u64, quant_bits: Option<u32>) -> Result<Self> {
        if q == 0 || phases.len() % q != 0 || phases.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: q.max(1),
                got: phases.len(),
                context: "sketch phases must fill whole rows",
            });
        }
        let values = phases.iter().map(|&t| cis(t)).collect();
        Ok(Self {
            q,
            m: phases.len() / q,
            seed,
            quant_bits,
            phases,
            values,
        })
    }

    pub fn cores(&self) -> usize {
        self.q
    }
    pub fn len(&self) -> usize {
        self.m
    }
    pub fn is_empty(&self) -> bool {
        self.m == 0
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn quant_bits(&self) -> Option<u32> {
        self.quant_bits
    }
    pub fn phases(&self) -> &[T] {
        &self.phases
    }
    /// Row-major `M x Q` complex entries.
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }
    pub fn row(&self, m: usize) -> &[Complex<T>] {
        &self.values[m * self.q..(m + 1) * self.q]
    }
    pub fn rows(&self) -> impl Iterator<Item = &[Complex<T>]> {
        self.values.chunks_exact(self.q)
    }
}

/// Draws `m` sketches of length `q`: `α_mq = exp(iθ)` with θ uniform on
/// `[0, 2π)`, or on the `2^bits`-level lattice when `quant_bits` is set.
pub fn draw_sketches<T: Real>(q: usize, m: usize, seed: u64, quant_bits: Option<u32>) -> Result<SketchBatch<T>> {
    if q == 0 || m == 0 {
        return Err(Error::InvalidArgument(format!("need Q >= 1 and M >= 1, got Q={q}, M={m}")));
    }
    if let Some(b) = quant_bits {
        if b == 0 || b > 24 {
            return Err(Error::InvalidArgument(format!("quantisation bits must be in 1..=24, got {b}")));
        }
    }
    let mut rng = rng_from_seed(seed);
    let tau = T::two_pi();
    let phases: Vec<T> = (0..q * m)
        .map(|_| match quant_bits {
            Some(b) => {
                let levels = 1u32 << b;
                let k = rng.random_range(0..levels);
                tau * T::lit(k as f64) / T::lit(levels as f64)
            }
            None => tau * T::lit(rng.random::<f64>()),
        })
        .collect();
    SketchBatch::from_phases(q, phases, seed, quant_bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_are_unit_modulus() {
        let s = draw_sketches::<f64>(110, 1, 5, None).unwrap();
        assert!(s.values().iter().all(|z| (z.norm() - 1.0).abs() <= 4.0 * f64::EPSILON));
        assert!(s.phases().iter().all(|&t| (0.0..std::f64::consts::TAU).contains(&t)));
    }

    #[test]
    fn sample_mean_vanishes() {
        let s = draw_sketches::<f64>(8, 100_000, 17, None).unwrap();
        for q in 0..8 {
            let mean = s.rows().map(|r| r[q]).sum::<Complex<f64>>() / 100_000.0;
            assert!(mean.norm() < 0.02, "core {q}: |mean| = {}", mean.norm());
        }
    }

    #[test]
    fn quantised_phases_on_lattice() {
        let s = draw_sketches::<f64>(110, 49, 3, Some(8)).unwrap();
        let step = std::f64::consts::TAU / 256.0;
        for &t in s.phases() {
            let k = t / step;
            assert!((k - k.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn seeded_and_serializable() {
        let a = draw_sketches::<f64>(4, 3, 1, None).unwrap();
        let b = draw_sketches::<f64>(4, 3, 1, None).unwrap();
        assert_eq!(a.phases(), b.phases());
        let js = serde_json::to_string(&a).unwrap();
        let back: SketchBatch<f64> = serde_json::from_str(&js).unwrap();
        assert_eq!(back.values(), a.values());
        assert!(draw_sketches::<f64>(0, 3, 1, None).is_err());
    }
}
