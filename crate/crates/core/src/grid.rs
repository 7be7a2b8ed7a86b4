//! Sampling grids for the image plane and its Fourier dual.
//!
//! A grid has `n1` points per axis over a field of view `L`. Pixel
//! coordinates are centred: index `a` maps to `(a - n1/2) * L / n1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
#[serde(try_from = "GridParams<T>", into = "GridParams<T>")]
pub struct Grid<T> {
    dim: usize,
    n1: usize,
    fov: T,
    wavelength: T,
    depth: T,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
struct GridParams<T> {
    dim: usize,
    n1: usize,
    fov: T,
    #[serde(default = "one")]
    wavelength: T,
    #[serde(default = "one")]
    depth: T,
}

fn one<T: Real>() -> T {
    T::one()
}

impl<T: Real> TryFrom<GridParams<T>> for Grid<T> {
    type Error = Error;
    fn try_from(p: GridParams<T>) -> Result<Self> {
        Grid::new(p.dim, p.n1, p.fov, p.wavelength, p.depth)
    }
}

impl<T: Real> From<Grid<T>> for GridParams<T> {
    fn from(g: Grid<T>) -> Self {
        GridParams {
            dim: g.dim,
            n1: g.n1,
            fov: g.fov,
            wavelength: g.wavelength,
            depth: g.depth,
        }
    }
}

impl<T: Real> Grid<T> {
    pub fn new(dim: usize, n1: usize, fov: T, wavelength: T, depth: T) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if n1 < 2 || n1 % 2 != 0 {
            return Err(Error::InvalidGrid(format!("n1 must be even and >= 2, got {n1}")));
        }
        if !(fov > T::zero()) {
            return Err(Error::InvalidGrid(format!("fov must be positive, got {fov}")));
        }
        if !(wavelength > T::zero()) || !(depth > T::zero()) {
            return Err(Error::InvalidGrid("wavelength and depth must be positive".into()));
        }
        Ok(Self {
            dim,
            n1,
            fov,
            wavelength,
            depth,
        })
    }

    /// Grid with `L = λ = z = 1`.
    pub fn unit(dim: usize, n1: usize) -> Result<Self> {
        Self::new(dim, n1, T::one(), T::one(), T::one())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn n1(&self) -> usize {
        self.n1
    }
    /// Total number of samples, `N = n1^dim`.
    pub fn len(&self) -> usize {
        self.n1.pow(self.dim as u32)
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn fov(&self) -> T {
        self.fov
    }
    pub fn wavelength(&self) -> T {
        self.wavelength
    }
    pub fn depth(&self) -> T {
        self.depth
    }
    pub fn lambda_z(&self) -> T {
        self.wavelength * self.depth
    }
    pub fn pixel_pitch(&self) -> T {
        self.fov / T::lit(self.n1 as f64)
    }
    /// Bandwidth `W = n1 / L`.
    pub fn bandwidth(&self) -> T {
        T::lit(self.n1 as f64) / self.fov
    }
    /// Frequency pitch `W / n1 = 1 / L`.
    pub fn frequency_pitch(&self) -> T {
        self.bandwidth() / T::lit(self.n1 as f64)
    }
    /// Distal-plane spacing that maps core differences onto frequency bins.
    pub fn core_pitch(&self) -> T {
        self.lambda_z() * self.frequency_pitch()
    }
    pub fn pixel_area(&self) -> T {
        self.pixel_pitch().powi(self.dim as i32)
    }
    /// Scaling `ϖ = L^dim / sqrt(N)` linking the continuous Fourier
    /// transform to the unitary DFT.
    pub fn scaling(&self) -> T {
        self.fov.powi(self.dim as i32) / T::lit(self.len() as f64).sqrt()
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.n1; self.dim]
    }

    /// Centred integer coordinate of an axis index.
    pub fn centred(&self, a: usize) -> i64 {
        a as i64 - (self.n1 / 2) as i64
    }

    /// Centred integer coordinates of a flat pixel index.
    pub fn pixel_lattice(&self, flat: usize) -> [i64; 2] {
        if self.dim == 1 {
            [self.centred(flat), 0]
        } else {
            [self.centred(flat / self.n1), self.centred(flat % self.n1)]
        }
    }

    /// Physical position of a flat pixel index.
    pub fn pixel_position(&self, flat: usize) -> [T; 2] {
        let [a, b] = self.pixel_lattice(flat);
        let h = self.pixel_pitch();
        [T::lit(a as f64) * h, T::lit(b as f64) * h]
    }

    fn wrap_axis(&self, c: i64) -> usize {
        c.rem_euclid(self.n1 as i64) as usize
    }

    /// Flat DFT index of a signed frequency bin (periodic wrap).
    pub fn bin_index(&self, chi: [i64; 2]) -> usize {
        if self.dim == 1 {
            self.wrap_axis(chi[0])
        } else {
            self.wrap_axis(chi[0]) * self.n1 + self.wrap_axis(chi[1])
        }
    }

    /// Signed representative in `[-n1/2, n1/2)` of a flat DFT index.
    pub fn signed_bin(&self, flat: usize) -> [i64; 2] {
        let half = (self.n1 / 2) as i64;
        let s = |c: usize| {
            let c = c as i64;
            if c >= half {
                c - self.n1 as i64
            } else {
                c
            }
        };
        if self.dim == 1 {
            [s(flat), 0]
        } else {
            [s(flat / self.n1), s(flat % self.n1)]
        }
    }

    /// DFT index of the conjugate frequency `-chi`.
    pub fn conjugate_bin(&self, flat: usize) -> usize {
        let [a, b] = self.signed_bin(flat);
        self.bin_index([-a, -b])
    }
}
