use num_complex::Complex;
use proptest::prelude::*;

use mcfli_core::calibration::{synth_fields, Perturbation};
use mcfli_core::layout::{fermat_spiral_layout, random_layout_1d};
use mcfli_core::linop::adjoint_mismatch;
use mcfli_core::scalar::{complex_norm2, norm1};
use mcfli_core::sensing::{debias, interferometric_matrix, CentredFourier, InterferometricOperator, MatrixPath};
use mcfli_core::sketch::draw_sketches;
use mcfli_core::solvers::{nyquist_recover, solve_bpdn_l1, solve_lasso, NyquistSketchSet, SolverConfig};
use mcfli_core::{CombinedOperator, Grid, HermitianMatrix, LinearOperator, SceneImage, SropOperator};

fn grid_1d(n: usize) -> Grid<f64> {
    Grid::unit(1, n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_split_is_exact(q in 1usize..12, seed in any::<u64>()) {
        let j = HermitianMatrix::<f64>::random(q, seed);
        let (d, h) = (j.diagonal_part(), j.hollow_part());
        prop_assert_eq!(d.add(&h), j.clone());
        prop_assert_eq!(d.hermitian_residual(), 0.0);
        prop_assert_eq!(h.hermitian_residual(), 0.0);
        prop_assert!(h.diagonal().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn seeded_constructors_repeat(seed in any::<u64>(), q in 2usize..20, m in 1usize..30) {
        let g = grid_1d(128);
        let a = draw_sketches::<f64>(q, m, seed, None).unwrap();
        let b = draw_sketches::<f64>(q, m, seed, None).unwrap();
        prop_assert_eq!(a.values(), b.values());
        let (la, lb) = (random_layout_1d(&g, q, seed).unwrap(), random_layout_1d(&g, q, seed).unwrap());
        prop_assert_eq!(la.positions(), lb.positions());
        let k = q.min(10);
        prop_assert_eq!(
            SceneImage::sparse_zero_mean(&g, k, seed).unwrap().values,
            SceneImage::sparse_zero_mean(&g, k, seed).unwrap().values
        );
        prop_assert_eq!(HermitianMatrix::<f64>::random(q, seed), HermitianMatrix::<f64>::random(q, seed));
    }

    #[test]
    fn visibility_set_is_symmetric(seed in any::<u64>(), q in 2usize..30) {
        let g = grid_1d(64);
        let l = random_layout_1d(&g, q, seed).unwrap();
        let mult = l.multiplicity();
        for j in 0..q {
            for k in 0..q {
                prop_assert_eq!(l.bin(j, k), g.conjugate_bin(l.bin(k, j)));
            }
        }
        for b in 0..g.len() {
            prop_assert_eq!(mult[b], mult[g.conjugate_bin(b)]);
        }
    }

    #[test]
    fn sketches_are_unit_modulus(seed in any::<u64>(), bits in proptest::option::of(1u32..12)) {
        let s = draw_sketches::<f64>(16, 8, seed, bits).unwrap();
        prop_assert!(s.values().iter().all(|z| (z.norm() - 1.0).abs() <= 4.0 * f64::EPSILON));
    }

    #[test]
    fn combined_adjoint_identity(seed in any::<u64>(), q in 2usize..16, m in 1usize..40) {
        let g = grid_1d(64);
        let b = CombinedOperator::new(random_layout_1d(&g, q, seed).unwrap(), &draw_sketches(q, m, seed ^ 1, None).unwrap()).unwrap();
        prop_assert!(adjoint_mismatch(&b, seed) <= 1e-10);
    }

    #[test]
    fn fft_and_direct_paths_agree(seed in any::<u64>(), q in 2usize..10) {
        let g = Grid::<f64>::unit(2, 16).unwrap();
        let layout = fermat_spiral_layout(&g, q, 7.0).unwrap().snapped();
        let f: Vec<f64> = SceneImage::sparse_zero_mean(&g, 20, seed).unwrap().values;
        let a = InterferometricOperator::new(layout.clone(), MatrixPath::FftPath).matrix(&f).unwrap();
        let d = InterferometricOperator::new(layout, MatrixPath::DirectSum).matrix(&f).unwrap();
        prop_assert!(a.sub(&d).frobenius_norm() <= 1e-10 * d.frobenius_norm());
    }

    #[test]
    fn centered_sensing_equals_debiased(seed in any::<u64>(), q in 2usize..10, m in 2usize..40) {
        let s = SropOperator::new(&draw_sketches::<f64>(q, m, seed, None).unwrap());
        let h = HermitianMatrix::<f64>::random(q, seed ^ 7);
        let a = s.centered_forward(&h).unwrap();
        let b = debias(&s.forward(&h).unwrap());
        let scale = h.frobenius_norm() * q as f64;
        prop_assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-12 * scale));
        // The centred map only sees the hollow part.
        let c = s.centered_forward(&h.hollow_part()).unwrap();
        prop_assert!(a.iter().zip(&c).all(|(x, y)| (x - y).abs() <= 1e-12 * scale));
    }

    #[test]
    fn nyquist_round_trip(seed in any::<u64>(), q in 2usize..9, c in -2.0f64..2.0) {
        let set = NyquistSketchSet::<f64>::new(q).unwrap();
        let h = HermitianMatrix::<f64>::random_constant_diagonal(q, c, seed);
        let r = nyquist_recover(&set, &set.operator().forward(&h).unwrap()).unwrap();
        prop_assert!(r.sub(&h).frobenius_norm() <= 1e-10 * h.frobenius_norm().max(1.0));
    }

    #[test]
    fn generalized_matrix_is_hermitian_and_psd(seed in any::<u64>()) {
        let g = Grid::<f64>::unit(2, 12).unwrap();
        let layout = fermat_spiral_layout(&g, 5, 4.0).unwrap();
        let fields = synth_fields(&layout, Perturbation::PhaseAberration { delta: 0.8 });
        let f = SceneImage::sparse_zero_mean(&g, 30, seed).unwrap().values;
        let signed = fields.generalized_matrix(&f).unwrap();
        prop_assert!(signed.hermitian_residual() <= 1e-12 * signed.frobenius_norm());
        let positive: Vec<f64> = f.iter().map(|v| v.abs()).collect();
        let ev = fields.generalized_matrix(&positive).unwrap().eigenvalues();
        let top = ev.iter().copied().fold(0.0, f64::max);
        prop_assert!(ev.iter().all(|&e| e >= -1e-10 * top));
    }
}

#[test]
fn frobenius_matches_restricted_spectrum() {
    // Summed over ordered pairs, so repeated visibilities count once per pair.
    let g = Grid::<f64>::unit(2, 64).unwrap();
    let layout = fermat_spiral_layout(&g, 12, 24.0).unwrap().snapped();
    let varpi = g.scaling();
    let fourier = CentredFourier::new(&g);
    for seed in 0..10 {
        let scene = SceneImage::sparse_zero_mean(&g, 40, seed).unwrap();
        let h = interferometric_matrix(&scene, &layout).unwrap();
        let spec = fourier.forward_real(&scene.values);
        let q = layout.cores();
        let restricted: Vec<Complex<f64>> = (0..q)
            .flat_map(|j| (0..q).filter(move |&k| k != j).map(move |k| (j, k)))
            .map(|(j, k)| spec[layout.bin(j, k)])
            .collect();
        let lhs = h.frobenius_norm().powi(2) / (varpi * varpi);
        let rhs = complex_norm2(&restricted).powi(2);
        assert!((lhs - rhs).abs() <= 1e-10 * rhs, "{lhs} vs {rhs}");
    }
}

#[test]
fn centred_srop_sandwich() {
    // (1/M)‖A_c(J)‖₁ for a unit-Frobenius hollow J stays in a loose bracket.
    let q = 8;
    let j = HermitianMatrix::<f64>::random(q, 31).hollow_part();
    let j = j.scale(1.0 / j.frobenius_norm());
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for seed in 0..100 {
        let s = SropOperator::new(&draw_sketches::<f64>(q, 2000, seed, None).unwrap());
        let v = norm1(&s.centered_forward(&j).unwrap()) / 2000.0;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    assert!(lo >= 0.05 && hi <= 1.2, "[{lo}, {hi}]");
}

#[test]
fn final_iterates_meet_their_constraints() {
    let g = grid_1d(128);
    for seed in 0..5 {
        let b = CombinedOperator::new(random_layout_1d(&g, 14, seed).unwrap(), &draw_sketches(14, 50, seed + 9, None).unwrap())
            .unwrap()
            .to_dense();
        let f = SceneImage::sparse_zero_mean(&g, 3, seed + 3).unwrap().values;
        let y = b.apply(&f);
        let tau = 0.5 * norm1(&f);
        let lasso = solve_lasso(&b, &y, tau, &SolverConfig::lasso(tau)).unwrap();
        assert!(norm1(&lasso.estimate) <= tau * (1.0 + 1e-12));
        let eps = 0.2 * norm1(&y);
        let bpdn = solve_bpdn_l1(&b, &y, eps, &SolverConfig::bpdn(eps)).unwrap();
        let r: f64 = b.apply(&bpdn.estimate).iter().zip(&y).map(|(a, c)| (a - c).abs()).sum();
        assert!(r <= eps * (1.0 + 1e-6) + 1e-9, "{r} > {eps}");
    }
}
