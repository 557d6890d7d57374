//! Periodic equispaced grid on `[−1, 1)` with `M = 2N+1` nodes and FFT-based
//! spectral differentiation. Mode `m ∈ {−N…N}` carries the symbol `iπm`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid mismatch: {0} nodes vs {1} nodes")]
    Mismatch(usize, usize),
    #[error("grid size must be odd, got {0}")]
    EvenSize(usize),
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("wave packet width must be positive, got {0}")]
    BadWidth(f64),
}

/// Imaginary residue tolerated when a real field is differentiated, relative
/// to the largest magnitude in the result.
const REAL_RESIDUE: f64 = 1e-12;

pub struct SpatialGrid {
    n: usize,
    nodes: Vec<f64>,
    /// `πm` in FFT storage order.
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpatialGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpatialGrid").field("M", &self.len()).finish()
    }
}

impl PartialEq for SpatialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl SpatialGrid {
    /// Grid with `M = 2N+1` nodes `xₙ = n/(N+½)`, `n = −N…N`.
    pub fn new(n: usize) -> Arc<Self> {
        let m = 2 * n + 1;
        let half = n as f64 + 0.5;
        let nodes = (0..m).map(|j| (j as f64 - n as f64) / half).collect();
        let wavenumbers = (0..m).map(|k| PI * mode_of(k, n) as f64).collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        Arc::new(Self { n, nodes, wavenumbers, forward, inverse })
    }

    pub fn with_size(m: usize) -> Result<Arc<Self>, GridError> {
        if m % 2 == 0 {
            return Err(GridError::EvenSize(m));
        }
        Ok(Self::new(m / 2))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of nodes `M`.
    pub fn len(&self) -> usize {
        2 * self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `πm` per FFT slot; slot `k` holds mode `k` for `k ≤ N`, else `k − M`.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn mode(&self, slot: usize) -> i64 {
        mode_of(slot, self.n)
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Unnormalized inverse transform; callers divide by `M`.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
    }

    /// Applies `symbol(πm)` to every mode of `buf` in place.
    pub fn apply_symbol<F: Fn(f64) -> Complex64>(&self, buf: &mut [Complex64], symbol: F) {
        self.forward(buf);
        let scale = 1.0 / self.len() as f64;
        for (c, &k) in buf.iter_mut().zip(&self.wavenumbers) {
            *c *= symbol(k) * scale;
        }
        self.inverse(buf);
    }

    /// Same-size check shared by the binary operations.
    pub fn check(&self, other: &SpatialGrid) -> Result<(), GridError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(GridError::Mismatch(self.len(), other.len()))
        }
    }
}

fn mode_of(slot: usize, n: usize) -> i64 {
    if slot <= n {
        slot as i64
    } else {
        slot as i64 - (2 * n + 1) as i64
    }
}

/// `(iκ)^order`
fn derivative_symbol(kappa: f64, order: u32) -> Complex64 {
    Complex64::new(0.0, kappa).powu(order)
}

#[derive(Clone, Debug)]
pub struct WaveFunction {
    grid: Arc<SpatialGrid>,
    values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Arc<SpatialGrid>, values: Vec<Complex64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::Length { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<SpatialGrid>) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, values }
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: Arc<SpatialGrid>, f: F) -> Self {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn differentiate(&self, order: u32) -> Self {
        let mut out = self.clone();
        if order > 0 {
            out.grid.apply_symbol(&mut out.values, |k| derivative_symbol(k, order));
        }
        out
    }

    pub fn l2_norm(&self) -> f64 {
        l2_norm(&self.values)
    }

    pub fn linf_norm(&self) -> f64 {
        linf_norm(&self.values)
    }

    /// Coefficients `c_m`, `m = −N…N`, of the trigonometric interpolant
    /// `Σ c_m e^{iπmx}`.
    pub fn fourier_coefficients(&self) -> Vec<Complex64> {
        let m = self.grid.len();
        let n = self.grid.n();
        let mut buf = self.values.clone();
        self.grid.forward(&mut buf);
        (-(n as i64)..=n as i64)
            .map(|mode| {
                let slot = mode.rem_euclid(m as i64) as usize;
                let phase = 2.0 * PI * (mode * n as i64).rem_euclid(m as i64) as f64 / m as f64;
                buf[slot] * Complex64::from_polar(1.0 / m as f64, phase)
            })
            .collect()
    }

    /// Samples `Σ c_m e^{iπmx}` on `grid`; modes beyond its `N` are dropped.
    pub fn from_coefficients(grid: Arc<SpatialGrid>, coeffs: &[Complex64]) -> Self {
        let m = grid.len();
        let n = grid.n() as i64;
        let src_n = (coeffs.len() / 2) as i64;
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (i, c) in coeffs.iter().enumerate() {
            let mode = i as i64 - src_n;
            if mode.abs() > n {
                continue;
            }
            let slot = mode.rem_euclid(m as i64) as usize;
            let phase = -2.0 * PI * (mode * n).rem_euclid(m as i64) as f64 / m as f64;
            buf[slot] = c * Complex64::from_polar(1.0, phase);
        }
        grid.inverse(&mut buf);
        Self { grid, values: buf }
    }

    /// Zero-pads or truncates the spectrum onto an odd grid of `m_new` nodes.
    pub fn resample(&self, m_new: usize) -> Result<Self, GridError> {
        if m_new == self.grid.len() {
            return Ok(self.clone());
        }
        let grid = SpatialGrid::with_size(m_new)?;
        Ok(Self::from_coefficients(grid, &self.fourier_coefficients()))
    }

    pub fn resample_onto(&self, grid: &Arc<SpatialGrid>) -> Self {
        if grid.len() == self.grid.len() {
            return self.clone();
        }
        Self::from_coefficients(grid.clone(), &self.fourier_coefficients())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GridError> {
        self.grid.check(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    pub fn conj(&self) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|c| c.conj()).collect() }
    }
}

/// Real samples of a scalar field, e.g. `∂ₓᵐṼⱼ`.
#[derive(Clone, Debug)]
pub struct GridField {
    grid: Arc<SpatialGrid>,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(grid: Arc<SpatialGrid>, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::Length { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<SpatialGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Arc<SpatialGrid>, f: F) -> Self {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Spectral derivative. Panics if the result has a non-negligible
    /// imaginary part, which would mean the transform is broken.
    pub fn differentiate(&self, order: u32) -> Self {
        if order == 0 || self.is_zero() {
            return self.clone();
        }
        let mut buf: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.grid.apply_symbol(&mut buf, |k| derivative_symbol(k, order));
        let top = std::f64::consts::PI * self.grid.n().max(1) as f64;
        let scale = self.max_abs().max(1.0) * top.powi(order as i32);
        let residue = buf.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        assert!(
            residue <= REAL_RESIDUE * scale,
            "imaginary residue {residue:e} differentiating a real field"
        );
        Self { grid: self.grid.clone(), values: buf.iter().map(|c| c.re).collect() }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn axpy(&mut self, c: f64, other: &GridField) -> Result<(), GridError> {
        self.grid.check(&other.grid)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `½(f·∂ᵏv + ∂ᵏ(f·v))`, the real part of `⟨k|f⟩` without its `iᵏ⁺¹` phase.
pub fn apply_jordan(k: u32, f: &GridField, v: &WaveFunction) -> Result<WaveFunction, GridError> {
    f.grid.check(&v.grid)?;
    if k == 0 {
        let values = v.values.iter().zip(&f.values).map(|(u, g)| u * g).collect();
        return Ok(WaveFunction { grid: v.grid.clone(), values });
    }
    let dv = v.differentiate(k);
    let fv = WaveFunction {
        grid: v.grid.clone(),
        values: v.values.iter().zip(&f.values).map(|(u, g)| u * g).collect(),
    };
    let dfv = fv.differentiate(k);
    let values = dv
        .values
        .iter()
        .zip(&dfv.values)
        .zip(&f.values)
        .map(|((a, b), g)| 0.5 * (a * g + b))
        .collect();
    Ok(WaveFunction { grid: v.grid.clone(), values })
}

/// `√(2/M)·‖v‖₂`, a Riemann sum for the L² norm on `[−1, 1]`.
pub fn l2_norm(v: &[Complex64]) -> f64 {
    let s: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    (2.0 * s / v.len() as f64).sqrt()
}

pub fn linf_norm(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |m, c| m.max(c.norm()))
}

/// `(δπ)^{−1/4} exp(i k₀(x−x₀)/δ − (x−x₀)²/(2δ))`, with `x − x₀` taken as the
/// periodic distance.
pub fn gaussian_wave_packet(
    grid: Arc<SpatialGrid>,
    x0: f64,
    k0: f64,
    delta: f64,
) -> Result<WaveFunction, GridError> {
    if !(delta > 0.0) {
        return Err(GridError::BadWidth(delta));
    }
    let amp = (delta * PI).powf(-0.25);
    Ok(WaveFunction::from_fn(grid, |x| {
        let y = (x - x0 + 1.0).rem_euclid(2.0) - 1.0;
        Complex64::from_polar(amp * (-y * y / (2.0 * delta)).exp(), k0 * y / delta)
    }))
}

/// Fraction of `Σ|c_m|²` carried by modes with `|m| > (1 − frac)·N`.
pub fn spectral_tail_mass(v: &WaveFunction, frac: f64) -> f64 {
    let coeffs = v.fourier_coefficients();
    let n = v.grid.n() as f64;
    let cutoff = (1.0 - frac) * n;
    let mut total = 0.0;
    let mut tail = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        let m = (i as f64 - n).abs();
        total += c.norm_sqr();
        if m > cutoff {
            tail += c.norm_sqr();
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}
