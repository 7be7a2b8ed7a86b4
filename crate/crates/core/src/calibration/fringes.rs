use std::path::Path;

use num_complex::Complex;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::io::write_real_array;
use crate::rng::{child_seed, rng_from_seed};
use crate::scalar::{cis, Real};

use super::fields::WavefieldSet;

pub const PHASE_STEPS: usize = 8;
/// Pixels with `I₀₀ < REFERENCE_FLOOR · max I₀₀` are masked.
pub const REFERENCE_FLOOR: f64 = 1e-6;

/// Intensity frames `I_q0(x; φ_k) = |E_0(x) e^{iφ_k} + E_q(x)|²` for every
/// core `q` (the reference included) and `φ_k = 2πk/8`, plus the
/// reference-only frame `I₀₀ = |E_0|²`.
#[derive(Clone, Debug)]
pub struct FringeStack<T: Real> {
    grid: Grid<T>,
    cores: usize,
    frames: Vec<Vec<T>>,
    reference: Vec<T>,
    noise: f64,
}

#[derive(Serialize, Deserialize)]
struct FrameEntry {
    core: usize,
    step: usize,
    phase: f64,
    file: String,
}

#[derive(Serialize, Deserialize)]
struct Manifest<G> {
    grid: G,
    cores: usize,
    steps: usize,
    noise: f64,
    reference: String,
    frames: Vec<FrameEntry>,
}

impl<T: Real> FringeStack<T> {
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }
    pub fn cores(&self) -> usize {
        self.cores
    }
    pub fn frame(&self, q: usize, k: usize) -> &[T] {
        &self.frames[q * PHASE_STEPS + k]
    }
    pub fn reference(&self) -> &[T] {
        &self.reference
    }
    /// `8Q + 1`.
    pub fn frame_count(&self) -> usize {
        self.frames.len() + 1
    }
    pub fn noise(&self) -> f64 {
        self.noise
    }

    /// Writes one real array per frame plus `manifest.json` into `dir`.
    pub fn export(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let shape = self.grid.shape();
        let write = |name: &str, data: &[T]| -> Result<()> {
            let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join(name))?);
            write_real_array(&mut w, &shape, data)
        };
        write("reference.bin", &self.reference)?;
        let mut frames = Vec::with_capacity(self.frames.len());
        for q in 0..self.cores {
            for k in 0..PHASE_STEPS {
                let file = format!("frame_q{q:04}_k{k}.bin");
                write(&file, self.frame(q, k))?;
                frames.push(FrameEntry {
                    core: q,
                    step: k,
                    phase: std::f64::consts::TAU * k as f64 / PHASE_STEPS as f64,
                    file,
                });
            }
        }
        let manifest = Manifest {
            grid: &self.grid,
            cores: self.cores,
            steps: PHASE_STEPS,
            noise: self.noise,
            reference: "reference.bin".into(),
            frames,
        };
        std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }
}

/// Renders the `8Q + 1` calibration frames. With `sigma > 0`, each frame
/// receives white Gaussian noise of standard deviation `sigma` times its
/// mean intensity and is clipped at zero.
pub fn render_fringes<T: Real>(fields: &WavefieldSet<T>, sigma: f64, seed: u64) -> Result<FringeStack<T>> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("fringe noise level must be nonnegative, got {sigma}")));
    }
    let q = fields.cores();
    let e0 = fields.field(0);
    let noisy = |frame: Vec<T>, index: u64| -> Vec<T> {
        if sigma == 0.0 {
            return frame;
        }
        let mean = frame.iter().copied().sum::<T>().as_f64() / frame.len() as f64;
        let mut rng = rng_from_seed(child_seed(seed, index));
        frame
            .into_iter()
            .map(|v| {
                let n: f64 = StandardNormal.sample(&mut rng);
                (v + T::lit(sigma * mean * n)).max(T::zero())
            })
            .collect()
    };
    let frames: Vec<Vec<T>> = (0..q * PHASE_STEPS)
        .into_par_iter()
        .map(|idx| {
            let (core, k) = (idx / PHASE_STEPS, idx % PHASE_STEPS);
            let shift = cis(T::two_pi() * T::lit(k as f64) / T::lit(PHASE_STEPS as f64));
            let frame = e0
                .iter()
                .zip(fields.field(core))
                .map(|(&a, &b)| (a * shift + b).norm_sqr())
                .collect();
            noisy(frame, idx as u64 + 1)
        })
        .collect();
    let reference = noisy(e0.iter().map(|z| z.norm_sqr()).collect(), 0);
    Ok(FringeStack {
        grid: fields.grid().clone(),
        cores: q,
        frames,
        reference,
        noise: sigma,
    })
}

/// `Ẽ_q = X₇ / (8 √I₀₀)` where `X₇` is the last coefficient of the 8-point
/// DFT along the phase steps; equals `E_q e^{-iφ₀}` without noise. Masked
/// pixels are set to zero.
pub fn recover_fields<T: Real>(stack: &FringeStack<T>) -> Result<WavefieldSet<T>> {
    let n = stack.grid.len();
    let peak = stack.reference.iter().fold(T::zero(), |m, &v| m.max(v));
    let floor = T::lit(REFERENCE_FLOOR) * peak;
    let mask: Vec<bool> = stack.reference.iter().map(|&v| v > floor && v > T::zero()).collect();
    let masked = mask.iter().filter(|&&m| !m).count();
    if 2 * masked > n {
        return Err(Error::Calibration(format!(
            "reference intensity below floor on {masked} of {n} pixels"
        )));
    }
    // exp(-i2π·7k/8) = exp(i2πk/8)
    let twiddle: Vec<Complex<T>> = (0..PHASE_STEPS)
        .map(|k| cis(T::two_pi() * T::lit(k as f64) / T::lit(PHASE_STEPS as f64)))
        .collect();
    let eight = T::lit(PHASE_STEPS as f64);
    let fields = (0..stack.cores)
        .into_par_iter()
        .map(|q| {
            (0..n)
                .map(|i| {
                    if !mask[i] {
                        return Complex::new(T::zero(), T::zero());
                    }
                    let x7 = (0..PHASE_STEPS).fold(Complex::new(T::zero(), T::zero()), |acc, k| {
                        acc + twiddle[k] * stack.frame(q, k)[i]
                    });
                    x7 / (eight * stack.reference[i].sqrt())
                })
                .collect()
        })
        .collect();
    WavefieldSet::new(stack.grid.clone(), fields)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::{normalized_cross_correlation, synth_fields, Perturbation};
    use crate::layout::fermat_spiral_layout;
    use crate::scene::gaussian_vignette;
    use crate::sketch::draw_sketches;

    fn fields() -> WavefieldSet<f64> {
        let g = Grid::new(2, 32, 1.0, 1.0, 1.0).unwrap();
        let lay = fermat_spiral_layout(&g, 10, 16.0).unwrap().snapped();
        let w = gaussian_vignette(&g, 0.3);
        synth_fields(&lay, Perturbation::PhaseAberration { delta: 0.5 }).with_vignette(&w).unwrap()
    }

    #[test]
    fn constant_fields_give_textbook_fringes() {
        let g = Grid::<f64>::unit(1, 8).unwrap();
        let one = vec![Complex::new(1.0, 0.0); 8];
        let set = WavefieldSet::new(g, vec![one.clone(), one]).unwrap();
        let st = render_fringes(&set, 0.0, 0).unwrap();
        assert_eq!(st.frame_count(), 17);
        for k in 0..8 {
            let want = 2.0 + 2.0 * (std::f64::consts::TAU * k as f64 / 8.0).cos();
            assert!(st.frame(1, k).iter().all(|&v| (v - want).abs() < 1e-12));
        }
    }

    #[test]
    fn frame_sum_and_seventh_coefficient() {
        let set = fields();
        let st = render_fringes(&set, 0.0, 0).unwrap();
        let (e0, e3) = (set.field(0), set.field(3));
        for i in (0..e0.len()).step_by(37) {
            let is = e0[i].norm_sqr() + e3[i].norm_sqr();
            let sum: f64 = (0..8).map(|k| st.frame(3, k)[i]).sum();
            assert!((sum - 8.0 * is).abs() < 1e-10 * is.max(1e-30));
            let x7 = (0..8).fold(Complex::new(0.0, 0.0), |acc, k| {
                acc + cis(std::f64::consts::TAU * k as f64 / 8.0) * st.frame(3, k)[i]
            });
            let ii = 2.0 * e0[i].norm() * e3[i].norm();
            let phi = e3[i].arg() - e0[i].arg();
            let want = cis(phi) * (4.0 * ii);
            assert!((x7 - want).norm() < 1e-10 * ii.max(1e-30));
        }
    }

    #[test]
    fn noiseless_round_trip_is_referenced() {
        let set = fields();
        let back = recover_fields(&render_fringes(&set, 0.0, 0).unwrap()).unwrap();
        let e0 = set.field(0);
        for q in 0..set.cores() {
            for (i, (&r, &t)) in back.field(q).iter().zip(set.field(q)).enumerate() {
                let want = t * cis(-e0[i].arg());
                assert!((r - want).norm() <= 1e-10 * t.norm().max(1e-12));
            }
        }
        assert!(back.field(0).iter().all(|z| z.im.abs() <= 1e-12 * z.norm().max(1e-300) + 1e-300));
        let sk = draw_sketches::<f64>(set.cores(), 20, 3, None).unwrap();
        for a in sk.rows() {
            let c = normalized_cross_correlation(&back.speckle(a).unwrap(), &set.speckle(a).unwrap());
            assert!(c >= 0.999);
        }
    }

    #[test]
    fn noisy_round_trip() {
        let set = fields();
        let back = recover_fields(&render_fringes(&set, 0.01, 7).unwrap()).unwrap();
        let sk = draw_sketches::<f64>(set.cores(), 20, 4, None).unwrap();
        for a in sk.rows() {
            let c = normalized_cross_correlation(&back.speckle(a).unwrap(), &set.speckle(a).unwrap());
            assert!(c >= 0.99, "{c}");
        }
    }

    #[test]
    fn dark_reference_is_rejected() {
        let g = Grid::<f64>::unit(1, 8).unwrap();
        let mut dark = vec![Complex::new(0.0, 0.0); 8];
        dark[0] = Complex::new(1.0, 0.0);
        let set = WavefieldSet::new(g, vec![dark, vec![Complex::new(1.0, 0.0); 8]]).unwrap();
        assert!(recover_fields(&render_fringes(&set, 0.0, 0).unwrap()).is_err());
    }

    #[test]
    fn export_writes_manifest() {
        let set = fields();
        let st = render_fringes(&set, 0.0, 0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        st.export(dir.path()).unwrap();
        let m: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(m["frames"].as_array().unwrap().len(), 8 * set.cores());
        assert!(dir.path().join("frame_q0009_k7.bin").exists());
    }
}
