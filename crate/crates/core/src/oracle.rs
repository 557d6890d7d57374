//! Dense-matrix oracles for small instances: exponentials, logarithms, sBCH
//! residuals and explicit operator assembly.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::grid::{SpatialGrid, WaveFunction};
use crate::symlie::field::rational_to_f64;
use crate::symlie::{sbch_with, BracketAlgebra, Rational, SbchTable};
use std::sync::Arc;

pub type CMatrix = DMatrix<Complex64>;

pub fn expm(a: &CMatrix) -> CMatrix {
    a.exp()
}

fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Principal square root by the Denman–Beavers iteration.
fn sqrtm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = CMatrix::identity(n, n);
    for _ in 0..60 {
        let yi = y.clone().try_inverse().expect("square root iterate is invertible");
        let zi = z.clone().try_inverse().expect("square root iterate is invertible");
        let y_next = (&y + zi).scale(0.5);
        let z_next = (&z + yi).scale(0.5);
        let step = frobenius(&(&y_next - &y));
        y = y_next;
        z = z_next;
        if step <= 1e-15 * frobenius(&y) {
            break;
        }
    }
    y
}

/// Principal logarithm by inverse scaling and squaring: square roots until
/// `‖A − I‖ < 0.05`, then the Mercator series.
pub fn logm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let id = CMatrix::identity(n, n);
    let mut b = a.clone();
    let mut squarings = 0;
    while frobenius(&(&b - &id)) > 0.05 {
        b = sqrtm(&b);
        squarings += 1;
        assert!(squarings < 64, "logm: matrix too far from the identity");
    }
    let x = &b - &id;
    let mut term = x.clone();
    let mut sum = x.clone();
    for k in 2..60 {
        term = &term * &x;
        let c = if k % 2 == 0 { -1.0 } else { 1.0 } / k as f64;
        sum += term.scale(c);
        if frobenius(&term) * (1.0 / k as f64) < 1e-18 {
            break;
        }
    }
    sum.scale(2f64.powi(squarings))
}

/// Random skew-Hermitian matrix with Frobenius norm `norm`.
pub fn random_skew_hermitian<R: Rng>(rng: &mut R, dim: usize, norm: f64) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let a = &g - g.adjoint();
    let s = norm / frobenius(&a);
    a.scale(s)
}

/// `max |A + Aᴴ|` entrywise.
pub fn skew_hermitian_defect(a: &CMatrix) -> f64 {
    (a + a.adjoint()).iter().fold(0.0, |m, c| m.max(c.norm()))
}

/// Dense matrix with the Lie bracket `AB − BA`.
#[derive(Clone, Debug)]
pub struct DenseLie(pub CMatrix);

impl BracketAlgebra for DenseLie {
    type Error = std::convert::Infallible;
    type Context = ();

    fn zero_like(&self) -> Self {
        DenseLie(CMatrix::zeros(self.0.nrows(), self.0.ncols()))
    }

    fn add_scaled(&self, other: &Self, c: &Rational) -> Self {
        DenseLie(&self.0 + other.0.scale(rational_to_f64(c)))
    }

    fn bracket(&self, other: &Self, _: &[&Self], _: &()) -> Result<Self, Self::Error> {
        Ok(DenseLie(&self.0 * &other.0 - &other.0 * &self.0))
    }
}

/// `‖sbch(X,Y) − log(e^{X/2}e^{Y}e^{X/2})‖_F` for matrices.
pub fn sbch_residual(table: &SbchTable, x: &CMatrix, y: &CMatrix) -> f64 {
    let half = expm(&x.scale(0.5));
    let exact = logm(&(&half * expm(y) * &half));
    let series = match sbch_with(table, &DenseLie(x.clone()), &DenseLie(y.clone()), &()) {
        Ok(z) => z.0,
        Err(e) => match e {},
    };
    frobenius(&(series - exact))
}

/// Mean residuals over `samples` random pairs at each norm, and the
/// least-squares slope of log residual against log norm.
pub fn sbch_residual_order<R: Rng>(
    rng: &mut R,
    table: &SbchTable,
    dim: usize,
    norms: &[f64],
    samples: usize,
) -> (Vec<f64>, f64) {
    let pairs: Vec<(CMatrix, CMatrix)> = (0..samples)
        .map(|_| (random_skew_hermitian(rng, dim, 1.0), random_skew_hermitian(rng, dim, 1.0)))
        .collect();
    let residuals: Vec<f64> = norms
        .iter()
        .map(|&s| {
            pairs
                .iter()
                .map(|(x, y)| sbch_residual(table, &x.scale(s), &y.scale(s)))
                .sum::<f64>()
                / samples as f64
        })
        .collect();
    let slope = crate::stats::loglog_slope(norms, &residuals);
    (residuals, slope)
}

/// Matrix of a linear map on wave functions, assembled column by column.
pub fn assemble<F>(grid: &Arc<SpatialGrid>, op: F) -> CMatrix
where
    F: Fn(&WaveFunction) -> WaveFunction,
{
    let m = grid.len();
    let mut out = CMatrix::zeros(m, m);
    for j in 0..m {
        let mut e = WaveFunction::zeros(grid.clone());
        e.values_mut()[j] = Complex64::new(1.0, 0.0);
        let col = op(&e);
        for (i, v) in col.values().iter().enumerate() {
            out[(i, j)] = *v;
        }
    }
    out
}

pub fn apply_matrix(a: &CMatrix, v: &WaveFunction) -> WaveFunction {
    let x = nalgebra::DVector::from_column_slice(v.values());
    let y = a * x;
    WaveFunction::new(v.grid().clone(), y.iter().copied().collect()).expect("square matrix")
}
