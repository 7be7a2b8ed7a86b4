//! Empirical RIP constants of the debiased operator `B`.
//!
//! For unit-norm sparse `v` the ratio `(1/M) ‖B v‖₁` is sandwiched between
//! `m_K` and `M_K`. Both are compared with the envelope
//! `ϖ √|V0| / √N`, the typical size of `‖I_h[v]‖_F` for a unit `v`.

use anyhow::{ensure, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mcfli_core::layout::random_layout_1d;
use mcfli_core::rng::{child_seed, labelled_seed};
use mcfli_core::scalar::{norm1, norm2};
use mcfli_core::sketch::draw_sketches;
use mcfli_core::{CombinedOperator, Grid, LinearOperator, SceneImage};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RipEstimate {
    pub k0: usize,
    pub q: usize,
    pub m: usize,
    pub trials: usize,
    pub visibilities: usize,
    /// Empirical `m_K`: smallest observed `(1/M) ‖B v‖₁ / ‖v‖`.
    pub lower: f64,
    /// Empirical `M_K`: largest observed ratio.
    pub upper: f64,
    /// `ϖ √|V0| / √N`.
    pub envelope: f64,
    pub lower_ratio: f64,
    pub upper_ratio: f64,
}

/// `(1/M) ‖B v‖₁ / ‖v‖`.
pub fn l1_ratio<O: LinearOperator<f64> + ?Sized>(op: &O, v: &[f64]) -> f64 {
    norm1(&op.apply(v)) / (op.rows() as f64 * norm2(v))
}

/// Draws one layout and one sketch batch, then probes `trials` random
/// unit `K0`-sparse zero-mean vectors.
pub fn estimate_rip_constants(
    grid: &Grid<f64>,
    k0: usize,
    q: usize,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<RipEstimate> {
    ensure!(trials >= 100, "need at least 100 trials, got {trials}");
    ensure!(k0 >= 2, "a zero-mean sparse vector needs K0 >= 2");
    ensure!(k0 <= grid.len(), "K0 = {k0} exceeds N = {}", grid.len());
    let layout = random_layout_1d(grid, q, labelled_seed(seed, "layout"))?;
    let visibilities = layout.distinct_visibilities();
    let sketches = draw_sketches(q, m, labelled_seed(seed, "sketches"), None)?;
    let op = CombinedOperator::new(layout, &sketches)?;
    let vectors = labelled_seed(seed, "vectors");
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let v = SceneImage::sparse_zero_mean(grid, k0, child_seed(vectors, t as u64))?.values;
            Ok(l1_ratio(&op, &v))
        })
        .collect::<Result<_>>()?;
    let lower = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = ratios.iter().copied().fold(0.0, f64::max);
    let envelope = grid.scaling() * (visibilities as f64).sqrt() / (grid.len() as f64).sqrt();
    Ok(RipEstimate {
        k0,
        q,
        m,
        trials,
        visibilities,
        lower,
        upper,
        envelope,
        lower_ratio: lower / envelope,
        upper_ratio: upper / envelope,
    })
}

/// Exact extremes of the ratio over every `(e_j - e_k) / √2`, with the
/// minimising and maximising pairs.
pub fn exhaustive_pair_extremes<O: LinearOperator<f64> + ?Sized>(op: &O) -> ((f64, [usize; 2]), (f64, [usize; 2])) {
    let n = op.cols();
    let pairs: Vec<[usize; 2]> = (0..n).flat_map(|j| (j + 1..n).map(move |k| [j, k])).collect();
    let scored: Vec<(f64, [usize; 2])> = pairs
        .par_iter()
        .map(|&[j, k]| {
            let mut v = vec![0.0; n];
            v[j] = std::f64::consts::FRAC_1_SQRT_2;
            v[k] = -std::f64::consts::FRAC_1_SQRT_2;
            (l1_ratio(op, &v), [j, k])
        })
        .collect();
    let lo = scored.iter().copied().fold((f64::INFINITY, [0, 0]), |a, b| if b.0 < a.0 { b } else { a });
    let hi = scored.iter().copied().fold((f64::NEG_INFINITY, [0, 0]), |a, b| if b.0 > a.0 { b } else { a });
    (lo, hi)
}
