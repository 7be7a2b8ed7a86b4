//! Fiber-core layouts and their visibility maps.
//!
//! A layout stores continuous core positions in the distal plane. The
//! visibility `(p_j - p_k) / (λz)` of every ordered pair is snapped to the
//! nearest frequency bin of the grid; the snapping residual is kept so that
//! off-grid configurations can be detected.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::rng::rng_from_seed;
use crate::scalar::{abs, Real};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
#[serde(try_from = "LayoutFile<T>", into = "LayoutFile<T>")]
pub struct CoreLayout<T> {
    grid: Grid<T>,
    positions: Vec<[T; 2]>,
    bins: Vec<usize>,
    residuals: Vec<T>,
    multiplicity: Vec<u32>,
    distinct_nonzero: usize,
}

/// JSON schema of a layout: the grid plus one coordinate array per core.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct LayoutFile<T> {
    pub grid: Grid<T>,
    pub positions: Vec<Vec<T>>,
}

impl<T: Real> TryFrom<LayoutFile<T>> for CoreLayout<T> {
    type Error = Error;
    fn try_from(f: LayoutFile<T>) -> Result<Self> {
        let dim = f.grid.dim();
        let mut pos = Vec::with_capacity(f.positions.len());
        for p in &f.positions {
            if p.len() != dim {
                return Err(Error::InvalidLayout(format!(
                    "position has {} coordinates, grid is {dim}-D",
                    p.len()
                )));
            }
            pos.push([p[0], if dim == 2 { p[1] } else { T::zero() }]);
        }
        CoreLayout::new(f.grid, pos)
    }
}

impl<T: Real> From<CoreLayout<T>> for LayoutFile<T> {
    fn from(l: CoreLayout<T>) -> Self {
        let dim = l.grid.dim();
        LayoutFile {
            positions: l.positions.iter().map(|p| p[..dim].to_vec()).collect(),
            grid: l.grid,
        }
    }
}

/// Golden angle `π (3 - √5)` in radians.
pub fn golden_angle<T: Real>() -> T {
    T::PI() * (T::lit(3.0) - T::lit(5.0).sqrt())
}

impl<T: Real> CoreLayout<T> {
    pub fn new(grid: Grid<T>, positions: Vec<[T; 2]>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidLayout("at least one core is required".into()));
        }
        let q = positions.len();
        let inv_pitch = T::one() / (grid.lambda_z() * grid.frequency_pitch());
        let mut bins = vec![0usize; q * q];
        let mut residuals = vec![T::zero(); q * q];
        let mut multiplicity = vec![0u32; grid.len()];
        let axes = grid.dim();
        for j in 0..q {
            for k in 0..q {
                let mut chi = [0i64; 2];
                let mut res = T::zero();
                if j != k {
                    for ax in 0..axes {
                        let c = (positions[j][ax] - positions[k][ax]) * inv_pitch;
                        let r = c.round();
                        chi[ax] = r.as_f64() as i64;
                        res = res.max(abs(c - r));
                    }
                }
                let b = grid.bin_index(chi);
                bins[j * q + k] = b;
                residuals[j * q + k] = res;
                if j != k {
                    multiplicity[b] += 1;
                }
            }
        }
        let distinct_nonzero = multiplicity
            .iter()
            .enumerate()
            .filter(|&(b, &c)| b != 0 && c > 0)
            .count();
        Ok(Self {
            grid,
            positions,
            bins,
            residuals,
            multiplicity,
            distinct_nonzero,
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }
    pub fn cores(&self) -> usize {
        self.positions.len()
    }
    pub fn positions(&self) -> &[[T; 2]] {
        &self.positions
    }

    /// Flat DFT index `l(j, k)` of the visibility of pair `(j, k)`.
    #[inline]
    pub fn bin(&self, j: usize, k: usize) -> usize {
        self.bins[j * self.cores() + k]
    }
    /// Row-major `Q x Q` table of visibility bins.
    pub fn bins(&self) -> &[usize] {
        &self.bins
    }
    /// Snapping residual of pair `(j, k)` in bin units (max over axes).
    pub fn snap_residual(&self, j: usize, k: usize) -> T {
        self.residuals[j * self.cores() + k]
    }
    pub fn max_snap_residual(&self) -> T {
        self.residuals.iter().fold(T::zero(), |m, &r| m.max(r))
    }
    pub fn is_on_grid(&self) -> bool {
        self.max_snap_residual() <= T::lit(1e-6)
    }
    /// Number of off-diagonal pairs landing on each frequency bin.
    pub fn multiplicity(&self) -> &[u32] {
        &self.multiplicity
    }
    /// `|V0|` counted as distinct non-zero bins occupied by off-diagonal pairs.
    pub fn distinct_visibilities(&self) -> usize {
        self.distinct_nonzero
    }
    /// True when every off-diagonal pair has its own non-zero bin.
    pub fn is_distinct(&self) -> bool {
        let q = self.cores();
        self.distinct_nonzero == q * (q - 1) && self.multiplicity[0] == 0
    }
    /// Bin histogram of the full visibility multiset, zero frequency included.
    pub fn visibility_histogram(&self) -> Vec<u32> {
        let mut h = self.multiplicity.clone();
        h[0] += self.cores() as u32;
        h
    }

    /// Same cores with positions rounded to the lattice that puts every
    /// visibility on a frequency bin.
    pub fn snapped(&self) -> Self {
        let pitch = self.grid.core_pitch();
        let positions = self
            .positions
            .iter()
            .map(|p| [(p[0] / pitch).round() * pitch, (p[1] / pitch).round() * pitch])
            .collect();
        Self::new(self.grid.clone(), positions).expect("non-empty layout")
    }

    /// Keeps every `step`-th core, starting with core 0.
    pub fn subsample(&self, step: usize) -> Result<Self> {
        if step == 0 {
            return Err(Error::InvalidLayout("subsampling step must be positive".into()));
        }
        let positions = self.positions.iter().step_by(step).copied().collect();
        Self::new(self.grid.clone(), positions)
    }

    /// Same positions expressed on another grid (for coarse bin counting).
    pub fn regrid(&self, grid: Grid<T>) -> Result<Self> {
        Self::new(grid, self.positions.clone())
    }
}

/// Draws `q` distinct lattice positions uniformly in `[-N/2, N/2)` on a 1-D grid.
pub fn random_layout_1d<T: Real>(grid: &Grid<T>, q: usize, seed: u64) -> Result<CoreLayout<T>> {
    if grid.dim() != 1 {
        return Err(Error::InvalidLayout("random_layout_1d needs a 1-D grid".into()));
    }
    if q < 2 {
        return Err(Error::InvalidLayout(format!("need at least 2 cores, got {q}")));
    }
    let n = grid.len();
    if q > n {
        return Err(Error::InvalidLayout(format!("{q} cores exceed the {n} grid positions")));
    }
    let mut rng = rng_from_seed(seed);
    let pitch = grid.core_pitch();
    let positions = index::sample(&mut rng, n, q)
        .into_iter()
        .map(|i| [T::lit(grid.centred(i) as f64) * pitch, T::zero()])
        .collect();
    CoreLayout::new(grid.clone(), positions)
}

/// `q` cores on Fermat's golden spiral: angle `i · golden`, radius
/// `(D/2) sqrt(i / (q - 1))`, so that the outermost core sits on the
/// layout diameter `diameter`.
pub fn fermat_spiral_layout<T: Real>(grid: &Grid<T>, q: usize, diameter: T) -> Result<CoreLayout<T>> {
    if grid.dim() != 2 {
        return Err(Error::InvalidLayout("Fermat spiral needs a 2-D grid".into()));
    }
    if q == 0 {
        return Err(Error::InvalidLayout("need at least one core".into()));
    }
    if !(diameter > T::zero()) {
        return Err(Error::InvalidLayout("diameter must be positive".into()));
    }
    let ga = golden_angle::<T>();
    let half = diameter / T::lit(2.0);
    let denom = T::lit(q.saturating_sub(1).max(1) as f64);
    let positions = (0..q)
        .map(|i| {
            let r = half * (T::lit(i as f64) / denom).sqrt();
            let (s, c) = (ga * T::lit(i as f64)).sin_cos();
            [r * c, r * s]
        })
        .collect();
    CoreLayout::new(grid.clone(), positions)
}
