//! Illumination patterns shed by the fibre tip, and the raster-scan and
//! speckle-illumination acquisition modes built on them.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::hermitian::HermitianMatrix;
use crate::layout::CoreLayout;
use crate::linop::DenseOperator;
use crate::scalar::{cis, Real};
use crate::scene::SceneImage;
use crate::sketch::SketchBatch;

use super::debias;
use super::fourier::CentredFourier;
use super::interferometric::interferometric_matrix;

/// Intensity `S(x; α) = w(x) |Σ_q α_q exp(i2π p_q·x / λz)|²` on the grid.
#[derive(Clone, Debug)]
pub struct SpeckleField<T: Real> {
    pub grid: Grid<T>,
    pub intensity: Vec<T>,
    pub sketch: Vec<Complex<T>>,
}

impl<T: Real> SpeckleField<T> {
    /// Quadrature `⟨S, f⟩ = Σ_x S(x) f(x) · (pixel area)`.
    pub fn integrate(&self, f: &[T]) -> T {
        let area = self.grid.pixel_area();
        self.intensity.iter().zip(f).map(|(&s, &v)| s * v).sum::<T>() * area
    }
}

fn check_sketch<T: Real>(layout: &CoreLayout<T>, sketch: &[Complex<T>]) -> Result<()> {
    if sketch.len() != layout.cores() {
        return Err(Error::DimensionMismatch {
            expected: layout.cores(),
            got: sketch.len(),
            context: "sketch length vs number of cores",
        });
    }
    Ok(())
}

fn apply_window<T: Real>(mut s: Vec<T>, vignette: Option<&[T]>) -> Vec<T> {
    if let Some(w) = vignette {
        s.iter_mut().zip(w).for_each(|(a, &b)| *a = *a * b);
    }
    s
}

/// Per-pixel evaluation of the core field sum.
pub fn speckle_direct<T: Real>(
    layout: &CoreLayout<T>,
    sketch: &[Complex<T>],
    vignette: Option<&[T]>,
) -> Result<SpeckleField<T>> {
    check_sketch(layout, sketch)?;
    let grid = layout.grid();
    let lz = grid.lambda_z();
    let s: Vec<T> = (0..grid.len())
        .map(|pix| {
            let x = grid.pixel_position(pix);
            let e = layout
                .positions()
                .iter()
                .zip(sketch)
                .fold(Complex::new(T::zero(), T::zero()), |acc, (p, &a)| {
                    let ph = (p[0] * x[0] + p[1] * x[1]) / lz;
                    acc + a * cis(T::two_pi() * ph)
                });
            e.norm_sqr()
        })
        .collect();
    Ok(SpeckleField {
        grid: grid.clone(),
        intensity: apply_window(s, vignette),
        sketch: sketch.to_vec(),
    })
}

/// Speckle intensity; uses one inverse FFT of the core impulse map when
/// the cores sit on the lattice `λz/L`, the direct sum otherwise.
pub fn speckle<T: Real>(
    layout: &CoreLayout<T>,
    sketch: &[Complex<T>],
    vignette: Option<&[T]>,
) -> Result<SpeckleField<T>> {
    check_sketch(layout, sketch)?;
    let grid = layout.grid();
    let pitch = grid.core_pitch();
    let mut lattice = Vec::with_capacity(layout.cores());
    for p in layout.positions() {
        let mut chi = [0i64; 2];
        for ax in 0..grid.dim() {
            let c = p[ax] / pitch;
            let r = c.round();
            if crate::scalar::abs(c - r) > T::lit(1e-9) {
                return speckle_direct(layout, sketch, vignette);
            }
            chi[ax] = r.as_f64() as i64;
        }
        lattice.push(grid.bin_index(chi));
    }
    let mut impulses = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    for (&b, &a) in lattice.iter().zip(sketch) {
        impulses[b] = impulses[b] + a;
    }
    let root_n = T::lit(grid.len() as f64).sqrt();
    let field = CentredFourier::new(grid).adjoint(&impulses);
    let s = field.into_iter().map(|e| (e * root_n).norm_sqr()).collect();
    Ok(SpeckleField {
        grid: grid.clone(),
        intensity: apply_window(s, vignette),
        sketch: sketch.to_vec(),
    })
}

/// Beam-steering sketch `γ_θ = (exp(-i2π θ·p_q / λz))_q`.
pub fn tilt_sketch<T: Real>(layout: &CoreLayout<T>, theta: [T; 2]) -> Vec<Complex<T>> {
    let lz = layout.grid().lambda_z();
    layout
        .positions()
        .iter()
        .map(|p| cis(-T::two_pi() * (theta[0] * p[0] + theta[1] * p[1]) / lz))
        .collect()
}

/// Raster-scan value `γ_θ^* I[f°] γ_θ` for one tilt.
pub fn rs_measure<T: Real>(scene: &SceneImage<T>, layout: &CoreLayout<T>, theta: [T; 2]) -> Result<T> {
    let h = interferometric_matrix(scene, layout)?;
    Ok(h.quadratic_form(&tilt_sketch(layout, theta)).re)
}

/// Raster scan along `path`; the interferometric matrix is built once.
pub fn rs_scan<T: Real>(scene: &SceneImage<T>, layout: &CoreLayout<T>, path: &[[T; 2]]) -> Result<Vec<T>> {
    let h = interferometric_matrix(scene, layout)?;
    Ok(scan_matrix(&h, layout, path))
}

fn scan_matrix<T: Real>(h: &HermitianMatrix<T>, layout: &CoreLayout<T>, path: &[[T; 2]]) -> Vec<T> {
    use rayon::prelude::*;
    path.par_iter()
        .map(|&theta| h.quadratic_form(&tilt_sketch(layout, theta)).re)
        .collect()
}

/// Array-factor PSF `φ(x) = |Σ_q exp(i2π p_q·x / λz)|²` on the grid,
/// computed from the histogram of the visibility multiset.
pub fn point_spread_function<T: Real>(layout: &CoreLayout<T>) -> Vec<T> {
    let grid = layout.grid();
    let hist: Vec<Complex<T>> = layout
        .visibility_histogram()
        .into_iter()
        .map(|c| Complex::new(T::lit(c as f64), T::zero()))
        .collect();
    let root_n = T::lit(grid.len() as f64).sqrt();
    CentredFourier::new(grid)
        .adjoint(&hist)
        .into_iter()
        .map(|z| z.re * root_n)
        .collect()
}

/// Speckle-illumination acquisition `y = Sᵀ f` where column `m` of `S` is the
/// quadrature-weighted speckle `s_m = (pixel area) · S(·; α_m)`.
/// Returns `y` and `S` stored as an `N x M` dense matrix.
pub fn si_measure<T: Real>(
    scene: &SceneImage<T>,
    layout: &CoreLayout<T>,
    sketches: &SketchBatch<T>,
) -> Result<(Vec<T>, DenseOperator<T>)> {
    if &scene.grid != layout.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = layout.grid();
    let (n, m) = (grid.len(), sketches.len());
    let area = grid.pixel_area();
    let mut data = vec![T::zero(); n * m];
    let mut y = Vec::with_capacity(m);
    for (col, alpha) in sketches.rows().enumerate() {
        let s = speckle(layout, alpha, scene.vignette.as_deref())?;
        y.push(s.integrate(&scene.values));
        for (row, &v) in s.intensity.iter().enumerate() {
            data[row * m + col] = v * area;
        }
    }
    Ok((y, DenseOperator::new(n, m, data)))
}

/// `√M Φ = D Sᵀ S̄⁻¹` with `D = I - (1/M) 11ᵀ` and `S̄ = diag(s̄)`, as an
/// `M x N` dense matrix. `s_mean` must be strictly positive.
pub fn si_sensing_model<T: Real>(s: &DenseOperator<T>, s_mean: &[T]) -> Result<DenseOperator<T>> {
    use crate::linop::LinearOperator;
    let (n, m) = (s.rows(), s.cols());
    if s_mean.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: s_mean.len(),
            context: "mean speckle",
        });
    }
    if s_mean.iter().any(|&v| v <= T::zero()) {
        return Err(Error::InvalidArgument("mean speckle must be positive".into()));
    }
    let mut data = vec![T::zero(); m * n];
    for px in 0..n {
        let col: Vec<T> = s.row(px).iter().map(|&v| v / s_mean[px]).collect();
        for (mi, v) in debias(&col).into_iter().enumerate() {
            data[mi * n + px] = v;
        }
    }
    Ok(DenseOperator::new(m, n, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::random_layout_1d;
    use crate::linop::LinearOperator;
    use crate::sensing::srop_forward;
    use crate::sketch::draw_sketches;

    fn grid() -> Grid<f64> {
        Grid::new(1, 128, 4.0, 0.5, 2.0).unwrap()
    }

    #[test]
    fn single_core_is_flat() {
        let g = grid();
        let lay = CoreLayout::new(g.clone(), vec![[0.75, 0.0]]).unwrap();
        let w: Vec<f64> = (0..128).map(|i| 1.0 + i as f64 / 128.0).collect();
        let s = speckle(&lay, &[cis(0.4)], Some(&w)).unwrap();
        for (a, b) in s.intensity.iter().zip(&w) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn beamformed_peak_at_origin() {
        let g = grid();
        let lay = random_layout_1d(&g, 9, 3).unwrap();
        let s = speckle(&lay, &vec![Complex::new(1.0, 0.0); 9], None).unwrap();
        let centre = 64;
        assert!((s.intensity[centre] - 81.0).abs() < 1e-9);
        assert!(s.intensity.iter().all(|&v| v <= 81.0 + 1e-9 && v >= 0.0));
    }

    #[test]
    fn fft_matches_direct() {
        let g = grid();
        let lay = random_layout_1d(&g, 7, 8).unwrap();
        let sk = draw_sketches::<f64>(7, 1, 2, None).unwrap();
        let a = speckle(&lay, sk.row(0), None).unwrap();
        let b = speckle_direct(&lay, sk.row(0), None).unwrap();
        for (x, y) in a.intensity.iter().zip(&b.intensity) {
            assert!((x - y).abs() < 1e-9 * 49.0);
        }
    }

    #[test]
    fn inner_product_matches_srop() {
        let g = grid();
        let lay = random_layout_1d(&g, 6, 4).unwrap();
        let scene = SceneImage::sparse_zero_mean(&g, 5, 1).unwrap();
        let sk = draw_sketches::<f64>(6, 8, 7, None).unwrap();
        let (y, s) = si_measure(&scene, &lay, &sk).unwrap();
        let h = interferometric_matrix(&scene, &lay).unwrap();
        let ys = srop_forward(&h, &sk).unwrap();
        let scale = ys.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in y.iter().zip(&ys) {
            assert!((a - b).abs() <= 1e-8 * scale);
        }
        let again = s.apply_adjoint(&scene.values);
        for (a, b) in again.iter().zip(&y) {
            assert!((a - b).abs() <= 1e-10 * scale);
        }
        let zero = SceneImage::zeros(&g);
        assert!(si_measure(&zero, &lay, &sk).unwrap().0.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn debiased_si_decomposition() {
        let g = grid();
        let lay = random_layout_1d(&g, 5, 5).unwrap();
        let w = crate::scene::gaussian_vignette(&g, 0.4);
        let scene = SceneImage::sparse_zero_mean(&g, 4, 2).unwrap().with_vignette(w.clone()).unwrap();
        let sk = draw_sketches::<f64>(5, 10, 3, None).unwrap();
        let (y, s) = si_measure(&scene, &lay, &sk).unwrap();
        let area = g.pixel_area();
        let s_mean: Vec<f64> = w.iter().map(|&v| 5.0 * v * area).collect();
        let phi = si_sensing_model(&s, &s_mean).unwrap();
        let sbar_f: Vec<f64> = scene.values.iter().zip(&s_mean).map(|(a, b)| a * b).collect();
        let lhs = phi.apply(&sbar_f);
        let rhs = debias(&y);
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn tilt_is_translation() {
        let g = Grid::<f64>::unit(1, 128).unwrap();
        let lay = random_layout_1d(&g, 6, 2).unwrap();
        let scene = SceneImage::spikes(&g, &[60, 70], &[1.0, -0.4]).unwrap();
        let shift = 5usize;
        let theta = [g.pixel_pitch() * shift as f64, 0.0];
        let lhs = rs_measure(&scene, &lay, theta).unwrap();
        let mut moved = vec![0.0; 128];
        for i in shift..128 {
            moved[i - shift] = scene.values[i];
        }
        let moved = SceneImage::from_values(&g, moved).unwrap();
        let h = interferometric_matrix(&moved, &lay).unwrap();
        let rhs = h.quadratic_form(&vec![Complex::new(1.0, 0.0); 6]).re;
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn delta_scan_is_psf() {
        let g = Grid::<f64>::unit(1, 128).unwrap();
        let lay = random_layout_1d(&g, 6, 9).unwrap();
        let spot = 64 + 10;
        let amp = 2.0;
        let scene = SceneImage::spikes(&g, &[spot], &[amp]).unwrap();
        let path: Vec<[f64; 2]> = (0..128).map(|p| g.pixel_position(p)).collect();
        let map = rs_scan(&scene, &lay, &path).unwrap();
        let psf = point_spread_function(&lay);
        let area = g.pixel_area();
        for t in 0..128usize {
            let idx = (t + 128 + 64 - spot) % 128;
            assert!((map[t] - amp * area * psf[idx]).abs() < 1e-9, "{t}");
        }
        let at_spike = rs_measure(&scene, &lay, g.pixel_position(spot)).unwrap();
        assert!((at_spike - 36.0 * amp * area).abs() < 1e-9);
    }
}
