//! File formats.
//!
//! Binary arrays (little-endian):
//!
//! | offset | size      | content                                   |
//! |--------|-----------|-------------------------------------------|
//! | 0      | 8         | magic `MCFLIARR`                          |
//! | 8      | 2         | version, `u16` = 1                        |
//! | 10     | 2         | dtype tag: 1 = complex f64, 2 = real f64  |
//! | 12     | 4         | `ndim`, `u32`                             |
//! | 16     | 8 · ndim  | dimensions, `u64` each                    |
//! | …      | payload   | row-major; complex entries as `[re, im]`  |
//!
//! A Hermitian matrix of order `Q` is a complex array with dims `[Q, Q]`.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::scalar::Real;

pub const MAGIC: &[u8; 8] = b"MCFLIARR";
pub const VERSION: u16 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u16)]
pub enum DType {
    Complex64x2 = 1,
    Real64 = 2,
}

impl DType {
    fn from_tag(tag: u16) -> Result<Self> {
        match tag {
            1 => Ok(DType::Complex64x2),
            2 => Ok(DType::Real64),
            t => Err(Error::Format(format!("unknown dtype tag {t}"))),
        }
    }
}

fn write_header<W: Write>(w: &mut W, dtype: DType, dims: &[usize]) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(dtype as u16).to_le_bytes())?;
    w.write_all(&(dims.len() as u32).to_le_bytes())?;
    for &d in dims {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    Ok(())
}

fn read_header<R: Read>(r: &mut R) -> Result<(DType, Vec<usize>)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut b2 = [0u8; 2];
    r.read_exact(&mut b2)?;
    let version = u16::from_le_bytes(b2);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    r.read_exact(&mut b2)?;
    let dtype = DType::from_tag(u16::from_le_bytes(b2))?;
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let ndim = u32::from_le_bytes(b4) as usize;
    if ndim > 8 {
        return Err(Error::Format(format!("implausible ndim {ndim}")));
    }
    let mut dims = Vec::with_capacity(ndim);
    let mut b8 = [0u8; 8];
    for _ in 0..ndim {
        r.read_exact(&mut b8)?;
        dims.push(u64::from_le_bytes(b8) as usize);
    }
    Ok((dtype, dims))
}

fn read_f64s<R: Read>(r: &mut R, n: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; n * 8];
    r.read_exact(&mut buf)?;
    Ok(buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

pub fn write_complex_array<W: Write, T: Real>(w: &mut W, dims: &[usize], data: &[Complex<T>]) -> Result<()> {
    let n: usize = dims.iter().product();
    if n != data.len() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: data.len(),
            context: "complex array payload",
        });
    }
    write_header(w, DType::Complex64x2, dims)?;
    let mut buf = Vec::with_capacity(n * 16);
    for z in data {
        buf.extend_from_slice(&z.re.as_f64().to_le_bytes());
        buf.extend_from_slice(&z.im.as_f64().to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_complex_array<R: Read, T: Real>(r: &mut R) -> Result<(Vec<usize>, Vec<Complex<T>>)> {
    let (dtype, dims) = read_header(r)?;
    if dtype != DType::Complex64x2 {
        return Err(Error::Format("expected a complex array".into()));
    }
    let n: usize = dims.iter().product();
    let raw = read_f64s(r, 2 * n)?;
    let data = raw.chunks_exact(2).map(|c| Complex::new(T::lit(c[0]), T::lit(c[1]))).collect();
    Ok((dims, data))
}

pub fn write_real_array<W: Write, T: Real>(w: &mut W, dims: &[usize], data: &[T]) -> Result<()> {
    let n: usize = dims.iter().product();
    if n != data.len() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: data.len(),
            context: "real array payload",
        });
    }
    write_header(w, DType::Real64, dims)?;
    let buf: Vec<u8> = data.iter().flat_map(|x| x.as_f64().to_le_bytes()).collect();
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_real_array<R: Read, T: Real>(r: &mut R) -> Result<(Vec<usize>, Vec<T>)> {
    let (dtype, dims) = read_header(r)?;
    if dtype != DType::Real64 {
        return Err(Error::Format("expected a real array".into()));
    }
    let n: usize = dims.iter().product();
    Ok((dims, read_f64s(r, n)?.into_iter().map(T::lit).collect()))
}

pub fn write_matrix<W: Write, T: Real>(w: &mut W, m: &HermitianMatrix<T>) -> Result<()> {
    write_complex_array(w, &[m.order(), m.order()], m.entries())
}

pub fn read_matrix<R: Read, T: Real>(r: &mut R) -> Result<HermitianMatrix<T>> {
    let (dims, data) = read_complex_array::<R, T>(r)?;
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(Error::Format(format!("expected a square matrix, got dims {dims:?}")));
    }
    HermitianMatrix::from_row_major(dims[0], data, T::lit(1e-12))
}

pub fn save_matrix<T: Real>(path: &Path, m: &HermitianMatrix<T>) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_matrix(&mut f, m)?;
    f.flush()?;
    Ok(())
}

pub fn load_matrix<T: Real>(path: &Path) -> Result<HermitianMatrix<T>> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    read_matrix(&mut f)
}

/// Writes an 8-bit binary portable graymap, mapping `[lo, hi]` to `[0, 255]`.
pub fn write_pgm<W: Write, T: Real>(w: &mut W, width: usize, height: usize, data: &[T], lo: T, hi: T) -> Result<()> {
    if data.len() != width * height {
        return Err(Error::DimensionMismatch {
            expected: width * height,
            got: data.len(),
            context: "graymap pixels",
        });
    }
    write!(w, "P5\n{width} {height}\n255\n")?;
    let span = (hi - lo).as_f64();
    let px: Vec<u8> = data
        .iter()
        .map(|&v| {
            let t = if span > 0.0 { (v - lo).as_f64() / span } else { 0.0 };
            (t.clamp(0.0, 1.0) * 255.0).round() as u8
        })
        .collect();
    w.write_all(&px)?;
    Ok(())
}

/// Graymap scaled to the data range.
pub fn save_pgm<T: Real>(path: &Path, width: usize, height: usize, data: &[T]) -> Result<()> {
    let lo = data.iter().copied().fold(T::infinity(), T::min);
    let hi = data.iter().copied().fold(T::neg_infinity(), T::max);
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_pgm(&mut f, width, height, data, lo, hi)?;
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip_and_layout() {
        let m = HermitianMatrix::<f64>::random(3, 8);
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m).unwrap();
        assert_eq!(buf.len(), 16 + 2 * 8 + 9 * 16);
        assert_eq!(&buf[..8], MAGIC);
        assert_eq!(u16::from_le_bytes([buf[10], buf[11]]), 1);
        let re01 = f64::from_le_bytes(buf[32 + 16..32 + 24].try_into().unwrap());
        assert_eq!(re01, m.get(0, 1).re);
        let back: HermitianMatrix<f64> = read_matrix(&mut buf.as_slice()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_corrupt_headers() {
        let mut buf = Vec::new();
        write_real_array(&mut buf, &[2], &[1.0_f64, 2.0]).unwrap();
        assert!(read_complex_array::<_, f64>(&mut buf.as_slice()).is_err());
        let (dims, v) = read_real_array::<_, f64>(&mut buf.as_slice()).unwrap();
        assert_eq!((dims, v), (vec![2], vec![1.0, 2.0]));
        buf[0] = b'X';
        assert!(read_real_array::<_, f64>(&mut buf.as_slice()).is_err());
    }

    #[test]
    fn pgm_header() {
        let mut buf = Vec::new();
        write_pgm(&mut buf, 2, 1, &[0.0_f64, 1.0], 0.0, 1.0).unwrap();
        assert_eq!(&buf[..11], b"P5\n2 1\n255\n");
        assert_eq!(&buf[11..], &[0, 255]);
    }
}
