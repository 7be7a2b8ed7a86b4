use std::path::Path;

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::hermitian::HermitianMatrix;
use crate::io::{read_complex_array, write_complex_array};
use crate::layout::CoreLayout;
use crate::rng::{labelled_seed, rng_from_seed};
use crate::scalar::{cis, Real};
use crate::scene::SceneImage;
use crate::sensing::debias;
use crate::sketch::SketchBatch;

/// Synthetic departures from the ideal far-field core fields. Each core
/// gets its own deterministic pattern, drawn from a fixed internal stream.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Perturbation {
    #[default]
    None,
    /// `a_q(x) = 1 + δ sin(2π k_q·x / L + ψ_q)` with one to three fringes
    /// across the field of view.
    AmplitudeRipple { delta: f64 },
    /// `a_q(x) = exp(iδ P_q(x))` with `P_q` a random quadratic polynomial
    /// in coordinates normalised to `[-1, 1]`.
    PhaseAberration { delta: f64 },
}

/// Per-core complex fields `E_q(x)` sampled on the grid; core 0 is the
/// calibration reference.
#[derive(Clone, Debug)]
pub struct WavefieldSet<T: Real> {
    grid: Grid<T>,
    fields: Vec<Vec<Complex<T>>>,
}

impl<T: Real> WavefieldSet<T> {
    pub fn new(grid: Grid<T>, fields: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::Calibration("no core fields".into()));
        }
        for f in &fields {
            if f.len() != grid.len() {
                return Err(Error::DimensionMismatch {
                    expected: grid.len(),
                    got: f.len(),
                    context: "core field",
                });
            }
        }
        Ok(Self { grid, fields })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }
    pub fn cores(&self) -> usize {
        self.fields.len()
    }
    pub fn field(&self, q: usize) -> &[Complex<T>] {
        &self.fields[q]
    }
    pub fn fields(&self) -> &[Vec<Complex<T>>] {
        &self.fields
    }

    /// Multiplies every field by `√w`, so speckles pick up the window `w`.
    pub fn with_vignette(mut self, w: &[T]) -> Result<Self> {
        if w.len() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                got: w.len(),
                context: "vignette",
            });
        }
        for f in &mut self.fields {
            f.iter_mut().zip(w).for_each(|(e, &v)| *e = *e * v.max(T::zero()).sqrt());
        }
        Ok(self)
    }

    /// Multiplies every field by the same per-pixel unit phasor.
    pub fn rephased(&self, phase: &[T]) -> Self {
        let fields = self
            .fields
            .iter()
            .map(|f| f.iter().zip(phase).map(|(&e, &p)| e * cis(p)).collect())
            .collect();
        Self {
            grid: self.grid.clone(),
            fields,
        }
    }

    /// `S(x; α) = |Σ_q α_q E_q(x)|²`.
    pub fn speckle(&self, alpha: &[Complex<T>]) -> Result<Vec<T>> {
        if alpha.len() != self.cores() {
            return Err(Error::DimensionMismatch {
                expected: self.cores(),
                got: alpha.len(),
                context: "sketch length vs number of fields",
            });
        }
        let n = self.grid.len();
        let mut e = vec![Complex::new(T::zero(), T::zero()); n];
        for (f, &a) in self.fields.iter().zip(alpha) {
            e.iter_mut().zip(f).for_each(|(acc, &v)| *acc = *acc + a * v);
        }
        Ok(e.into_iter().map(|z| z.norm_sqr()).collect())
    }

    /// `G[h]_{jk} = Σ_x h(x) conj(E_j(x)) E_k(x) · (pixel area)`, so that
    /// `⟨S(·; α), h⟩ = α^* G[h] α`.
    pub fn generalized_matrix(&self, h: &[T]) -> Result<HermitianMatrix<T>> {
        if h.len() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                got: h.len(),
                context: "generalized matrix input",
            });
        }
        let area = self.grid.pixel_area();
        Ok(HermitianMatrix::from_upper(self.cores(), |j, k| {
            let s = self.fields[j]
                .iter()
                .zip(&self.fields[k])
                .zip(h)
                .fold(Complex::new(T::zero(), T::zero()), |acc, ((a, b), &v)| acc + a.conj() * b * v);
            s * area
        }))
    }

    /// `(1/Q) Σ_q |E_q|²`, the vignetting estimate of a calibrated set.
    pub fn vignette_estimate(&self) -> Vec<T> {
        let inv_q = T::one() / T::lit(self.cores() as f64);
        (0..self.grid.len())
            .map(|i| self.fields.iter().map(|f| f[i].norm_sqr()).sum::<T>() * inv_q)
            .collect()
    }

    /// Binary complex array with dims `[Q, n1]` or `[Q, n1, n1]`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut dims = vec![self.cores()];
        dims.extend(self.grid.shape());
        let flat: Vec<Complex<T>> = self.fields.iter().flatten().copied().collect();
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        write_complex_array(&mut w, &dims, &flat)
    }

    pub fn load(path: &Path, grid: Grid<T>) -> Result<Self> {
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        let (dims, flat) = read_complex_array::<_, T>(&mut r)?;
        let mut expect = vec![dims.first().copied().unwrap_or(0)];
        expect.extend(grid.shape());
        if dims != expect || dims[0] == 0 {
            return Err(Error::Format(format!("field array dims {dims:?} do not match grid {expect:?}")));
        }
        let fields = flat.chunks_exact(grid.len()).map(|c| c.to_vec()).collect();
        Self::new(grid, fields)
    }
}

/// `E_q(x) = a_q(x) exp(i2π p_q·x / λz)` for every core of the layout.
pub fn synth_fields<T: Real>(layout: &CoreLayout<T>, perturbation: Perturbation) -> WavefieldSet<T> {
    let grid = layout.grid().clone();
    let lz = grid.lambda_z();
    let half = grid.fov() / T::lit(2.0);
    let mut rng = rng_from_seed(labelled_seed(0x5eed, "core-field-perturbations"));
    let fields = layout
        .positions()
        .iter()
        .map(|p| {
            // Draw unconditionally so every variant sees the same stream.
            let k = [rng.random_range(1..=3) as f64, rng.random_range(-3..=3) as f64];
            let psi: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            let c: Vec<f64> = (0..5).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            (0..grid.len())
                .map(|pix| {
                    let x = grid.pixel_position(pix);
                    let carrier = cis(T::two_pi() * (p[0] * x[0] + p[1] * x[1]) / lz);
                    let (u, v) = ((x[0] / half).as_f64(), (x[1] / half).as_f64());
                    let a = match perturbation {
                        Perturbation::None => Complex::new(T::one(), T::zero()),
                        Perturbation::AmplitudeRipple { delta } => {
                            let arg = std::f64::consts::PI * (k[0] * u + k[1] * v) + psi;
                            Complex::new(T::lit(1.0 + delta * arg.sin()), T::zero())
                        }
                        Perturbation::PhaseAberration { delta } => {
                            let poly = c[0] * u + c[1] * v + c[2] * u * u + c[3] * u * v + c[4] * v * v;
                            cis(T::lit(delta * poly))
                        }
                    };
                    a * carrier
                })
                .collect()
        })
        .collect();
    WavefieldSet { grid, fields }
}

/// `z_m = ⟨S̃(·; α_m), h⟩` from the fields, debiased. The matrix `G̃[h]`
/// is never formed; `h` is the scene's raw values, any vignetting being
/// carried by the fields.
pub fn generalized_forward<T: Real>(
    fields: &WavefieldSet<T>,
    sketches: &SketchBatch<T>,
    scene: &SceneImage<T>,
) -> Result<Vec<T>> {
    if &scene.grid != fields.grid() {
        return Err(Error::GridMismatch);
    }
    if sketches.cores() != fields.cores() {
        return Err(Error::DimensionMismatch {
            expected: fields.cores(),
            got: sketches.cores(),
            context: "sketch length vs number of fields",
        });
    }
    let area = fields.grid().pixel_area();
    let h = &scene.values;
    let rows: Vec<&[Complex<T>]> = sketches.rows().collect();
    let z: Vec<T> = rows
        .par_iter()
        .map(|a| {
            let s = fields.speckle(a).expect("sketch length checked");
            s.iter().zip(h).map(|(&u, &v)| u * v).sum::<T>() * area
        })
        .collect();
    Ok(debias(&z))
}

/// Pearson correlation coefficient of two equally long vectors.
pub fn normalized_cross_correlation<T: Real>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len(), "cross-correlation inputs");
    let n = T::lit(a.len() as f64);
    let ma = a.iter().copied().sum::<T>() / n;
    let mb = b.iter().copied().sum::<T>() / n;
    let (mut sab, mut saa, mut sbb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab = sab + dx * dy;
        saa = saa + dx * dx;
        sbb = sbb + dy * dy;
    }
    if saa == T::zero() || sbb == T::zero() {
        return if saa == sbb { T::one() } else { T::zero() };
    }
    sab / (saa * sbb).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{fermat_spiral_layout, random_layout_1d};
    use crate::sensing::{interferometric_matrix, srop_forward, CombinedOperator};
    use crate::sketch::draw_sketches;

    fn layout() -> CoreLayout<f64> {
        let g = Grid::new(2, 32, 1.0, 1.0, 1.0).unwrap();
        fermat_spiral_layout(&g, 12, 20.0).unwrap().snapped()
    }

    #[test]
    fn farfield_speckle_matches_srop() {
        let lay = layout();
        let fields = synth_fields(&lay, Perturbation::None);
        let g = lay.grid().clone();
        let scene = SceneImage::sparse_zero_mean(&g, 10, 3).unwrap();
        let sk = draw_sketches::<f64>(12, 5, 4, None).unwrap();
        let y = srop_forward(&interferometric_matrix(&scene, &lay).unwrap(), &sk).unwrap();
        let area = g.pixel_area();
        for (m, a) in sk.rows().enumerate() {
            let s = fields.speckle(a).unwrap();
            let v: f64 = s.iter().zip(&scene.values).map(|(a, b)| a * b).sum::<f64>() * area;
            assert!((v - y[m]).abs() <= 1e-8 * y[m].abs().max(1.0));
        }
    }

    #[test]
    fn generalized_forward_matches_combined() {
        let lay = layout();
        let g = lay.grid().clone();
        let fields = synth_fields(&lay, Perturbation::None);
        let scene = SceneImage::sparse_zero_mean(&g, 8, 1).unwrap();
        let sk = draw_sketches::<f64>(12, 20, 2, None).unwrap();
        let z = generalized_forward(&fields, &sk, &scene).unwrap();
        let y = CombinedOperator::new(lay, &sk).unwrap().forward(&scene.values).unwrap();
        let num: f64 = z.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let den: f64 = y.iter().map(|b| b * b).sum::<f64>().sqrt();
        assert!(num <= 1e-6 * den);
        let zero = generalized_forward(&fields, &sk, &SceneImage::zeros(&g)).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
        let phase: Vec<f64> = (0..g.len()).map(|i| (i as f64 * 0.37).sin() * 3.0).collect();
        let z2 = generalized_forward(&fields.rephased(&phase), &sk, &scene).unwrap();
        for (a, b) in z.iter().zip(&z2) {
            assert!((a - b).abs() <= 1e-10 * den);
        }
    }

    #[test]
    fn ripple_stays_close_to_farfield() {
        let lay = layout();
        let g = lay.grid().clone();
        let h: Vec<f64> = (0..g.len()).map(|i| ((i * 7) % 5) as f64).collect();
        let ideal = interferometric_matrix(&SceneImage::from_values(&g, h.clone()).unwrap(), &lay).unwrap();
        let rippled = synth_fields(&lay, Perturbation::AmplitudeRipple { delta: 0.05 });
        let gen = rippled.generalized_matrix(&h).unwrap();
        let rel = gen.sub(&ideal).frobenius_norm() / ideal.frobenius_norm();
        assert!(rel <= 0.15, "{rel}");
        assert!(gen.hermitian_residual() == 0.0);
        assert!(gen.eigenvalues()[0] >= -1e-10 * gen.frobenius_norm());
        let aberrated = synth_fields(&lay, Perturbation::PhaseAberration { delta: 0.3 });
        let ga = aberrated.generalized_matrix(&h).unwrap();
        assert!(ga.eigenvalues()[0] >= -1e-10 * ga.frobenius_norm());
    }

    #[test]
    fn single_core_ignores_sketch_phase() {
        let g = Grid::<f64>::unit(1, 64).unwrap();
        let lay = random_layout_1d(&g, 2, 1).unwrap().subsample(2).unwrap();
        let fields = synth_fields(&lay, Perturbation::AmplitudeRipple { delta: 0.1 });
        let a = fields.speckle(&[cis(0.0)]).unwrap();
        let b = fields.speckle(&[cis(2.1)]).unwrap();
        for ((x, y), e) in a.iter().zip(&b).zip(fields.field(0)) {
            assert!((x - y).abs() < 1e-12 && (x - e.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn ncc_examples() {
        let a = [1.0f64, 2.0, 3.0];
        assert!((normalized_cross_correlation(&a, &[2.0, 4.0, 6.0]) - 1.0).abs() < 1e-12);
        assert!((normalized_cross_correlation(&a, &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn save_load_round_trip() {
        let lay = layout();
        let fields = synth_fields(&lay, Perturbation::PhaseAberration { delta: 0.2 });
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("fields.bin");
        fields.save(&p).unwrap();
        let back = WavefieldSet::load(&p, lay.grid().clone()).unwrap();
        assert_eq!(back.fields(), fields.fields());
    }
}
