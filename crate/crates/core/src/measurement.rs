//! Measurement vectors with provenance.

use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    None,
    Gaussian { sigma: f64 },
    Uniform { half_width: f64 },
}

impl FromStr for NoiseModel {
    type Err = Error;
    /// Parses `none`, `gaussian:<sigma>` or `uniform:<half_width>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let value = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(|| Error::UnknownNoiseModel(s.into()))?
                .parse::<f64>()
                .map_err(|_| Error::UnknownNoiseModel(s.into()))
        };
        match name.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(NoiseModel::None),
            "gaussian" => Ok(NoiseModel::Gaussian { sigma: value(arg)? }),
            "uniform" => Ok(NoiseModel::Uniform { half_width: value(arg)? }),
            _ => Err(Error::UnknownNoiseModel(s.into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseDescriptor {
    pub model: NoiseModel,
    /// Realised `‖n‖₁`.
    pub l1_budget: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensingMode {
    Srop,
    RasterScan,
    SpeckleIllumination,
    Generalized,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct MeasurementRecord<T> {
    pub raw: Vec<T>,
    pub debiased: Vec<T>,
    pub noise: NoiseDescriptor,
    pub mode: SensingMode,
    pub seed: u64,
}

impl<T: Real> MeasurementRecord<T> {
    /// Builds a record, debiasing `raw` by its mean.
    pub fn new(raw: Vec<T>, noise: NoiseDescriptor, mode: SensingMode, seed: u64) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidArgument("empty measurement vector".into()));
        }
        let debiased = crate::sensing::debias(&raw);
        Ok(Self {
            raw,
            debiased,
            noise,
            mode,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }
    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_noise_models() {
        assert_eq!("none".parse::<NoiseModel>().unwrap(), NoiseModel::None);
        assert_eq!(
            "gaussian:0.5".parse::<NoiseModel>().unwrap(),
            NoiseModel::Gaussian { sigma: 0.5 }
        );
        assert!("poisson:1".parse::<NoiseModel>().is_err());
        assert!("gaussian".parse::<NoiseModel>().is_err());
    }

    #[test]
    fn record_is_centered_and_serializes() {
        let noise = NoiseDescriptor {
            model: NoiseModel::None,
            l1_budget: 0.0,
        };
        let r = MeasurementRecord::new(vec![1.0_f64, 2.0, 6.0], noise, SensingMode::Srop, 3).unwrap();
        assert!(r.debiased.iter().sum::<f64>().abs() < 1e-12);
        assert_eq!(r.raw.len(), r.debiased.len());
        let js = serde_json::to_string(&r).unwrap();
        assert!(js.contains("\"mode\":\"srop\""));
        let back: MeasurementRecord<f64> = serde_json::from_str(&js).unwrap();
        assert_eq!(back.debiased, r.debiased);
    }
}
