//! Binary wave function snapshots.
//!
//! Layout, all little-endian: `b"MZWF"`, version `u32 = 1`, `M: u64`,
//! `ε: f64`, `t: f64`, then `M` pairs `(re, im)` of `f64`.

use std::io::{self, Read, Write};
use std::path::Path;

use mzs_core::grid::{SpatialGrid, WaveFunction};
use num_complex::Complex64;

pub const MAGIC: &[u8; 4] = b"MZWF";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub epsilon: f64,
    pub t: f64,
    pub values: Vec<Complex64>,
}

impl Snapshot {
    pub fn of(u: &WaveFunction, epsilon: f64, t: f64) -> Self {
        Self { epsilon, t, values: u.values().to_vec() }
    }

    pub fn to_wave_function(&self) -> io::Result<WaveFunction> {
        let grid = SpatialGrid::with_size(self.values.len()).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
        WaveFunction::new(grid, self.values.clone()).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(32 + 16 * self.values.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.values.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.epsilon.to_le_bytes());
        out.extend_from_slice(&self.t.to_le_bytes());
        for c in &self.values {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
        out
    }

    pub fn read_from<R: Read>(mut r: R) -> io::Result<Self> {
        let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        if &b4 != MAGIC {
            return Err(bad("not an MZWF snapshot"));
        }
        r.read_exact(&mut b4)?;
        if u32::from_le_bytes(b4) != VERSION {
            return Err(bad("unsupported snapshot version"));
        }
        r.read_exact(&mut b8)?;
        let m = u64::from_le_bytes(b8) as usize;
        let mut f64_next = |r: &mut R| -> io::Result<f64> {
            r.read_exact(&mut b8)?;
            Ok(f64::from_le_bytes(b8))
        };
        let epsilon = f64_next(&mut r)?;
        let t = f64_next(&mut r)?;
        let mut values = Vec::with_capacity(m.min(1 << 24));
        for _ in 0..m {
            let re = f64_next(&mut r)?;
            let im = f64_next(&mut r)?;
            values.push(Complex64::new(re, im));
        }
        Ok(Self { epsilon, t, values })
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut f = io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(&self.to_bytes())?;
        f.flush()
    }

    pub fn read(path: &Path) -> io::Result<Self> {
        Self::read_from(io::BufReader::new(std::fs::File::open(path)?))
    }
}
