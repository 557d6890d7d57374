//! Potentials `V(x, t)` and their Gauss–Legendre sampling over one step.

use std::sync::Arc;

use crate::exprparse::{bump, EvalError, Expr};
use crate::grid::{GridField, SpatialGrid};

use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialModel {
    Zero,
    Constant(f64),
    /// `ρ(4x) sin(20πx)`
    Lattice,
    /// `ρ(3t−1) ρ(sin(2π(x−t)))`
    Pulse,
    LatticeWithPulse,
    /// `t^power · g(x)`
    Separable { power: i32, g: Expr },
    Expr(Expr),
    /// `V(x, pivot − t)`
    TimeReversed { inner: Box<PotentialModel>, pivot: f64 },
}

pub fn lattice(x: f64) -> f64 {
    bump(4.0 * x) * (20.0 * PI * x).sin()
}

pub fn pulse(x: f64, t: f64) -> f64 {
    bump(3.0 * t - 1.0) * bump((2.0 * PI * (x - t)).sin())
}

impl PotentialModel {
    pub fn name(&self) -> String {
        match self {
            PotentialModel::Zero => "zero".into(),
            PotentialModel::Constant(c) => format!("constant {c}"),
            PotentialModel::Lattice => "lattice".into(),
            PotentialModel::Pulse => "pulse".into(),
            PotentialModel::LatticeWithPulse => "lattice_with_pulse".into(),
            PotentialModel::Separable { power, g } => format!("t^{power}*({g})"),
            PotentialModel::Expr(e) => e.to_string(),
            PotentialModel::TimeReversed { inner, pivot } => {
                format!("{} reversed about t={pivot}", inner.name())
            }
        }
    }

    /// The model sampled backwards over `[t, t+h]`: `s ↦ V(2t + h − s)`.
    pub fn reversed_over(&self, t: f64, h: f64) -> Self {
        PotentialModel::TimeReversed { inner: Box::new(self.clone()), pivot: 2.0 * t + h }
    }

    pub fn is_time_independent(&self) -> bool {
        match self {
            PotentialModel::Zero | PotentialModel::Constant(_) | PotentialModel::Lattice => true,
            PotentialModel::Pulse | PotentialModel::LatticeWithPulse => false,
            PotentialModel::Separable { power, .. } => *power == 0,
            PotentialModel::Expr(e) => !e.depends_on_t(),
            PotentialModel::TimeReversed { inner, .. } => inner.is_time_independent(),
        }
    }

    pub fn value(&self, x: f64, t: f64) -> Result<f64, EvalError> {
        Ok(match self {
            PotentialModel::Zero => 0.0,
            PotentialModel::Constant(c) => *c,
            PotentialModel::Lattice => lattice(x),
            PotentialModel::Pulse => pulse(x, t),
            PotentialModel::LatticeWithPulse => lattice(x) + pulse(x, t),
            PotentialModel::Separable { power, g } => t.powi(*power) * g.eval(x, t)?,
            PotentialModel::Expr(e) => e.eval(x, t)?,
            PotentialModel::TimeReversed { inner, pivot } => inner.value(x, pivot - t)?,
        })
    }

    pub fn evaluate_on_grid(&self, t: f64, grid: &Arc<SpatialGrid>) -> Result<GridField, EvalError> {
        let values = grid
            .nodes()
            .iter()
            .map(|&x| self.value(x, t))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GridField::new(grid.clone(), values).expect("one value per node"))
    }
}

/// Repeated evaluation on one grid with time-independent parts cached.
pub struct GridSampler<'a> {
    model: &'a PotentialModel,
    nodes: Arc<SpatialGrid>,
    fixed: Option<Vec<f64>>,
}

impl<'a> GridSampler<'a> {
    pub fn new(model: &'a PotentialModel, grid: &Arc<SpatialGrid>) -> Self {
        let fixed = match model {
            PotentialModel::LatticeWithPulse => Some(grid.nodes().iter().map(|&x| lattice(x)).collect()),
            m if m.is_time_independent() => {
                Some(grid.nodes().iter().map(|&x| m.value(x, 0.0)).collect::<Result<_, _>>().ok()).flatten()
            }
            _ => None,
        };
        Self { model, nodes: grid.clone(), fixed }
    }

    /// Writes `V(xₙ, t)` into `out`.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<(), EvalError> {
        match (self.model, &self.fixed) {
            (PotentialModel::LatticeWithPulse, Some(v0)) => {
                let envelope = bump(3.0 * t - 1.0);
                for ((o, x), v) in out.iter_mut().zip(self.nodes.nodes()).zip(v0) {
                    *o = if envelope == 0.0 { *v } else { v + envelope * bump((2.0 * PI * (x - t)).sin()) };
                }
            }
            (_, Some(v)) => out.copy_from_slice(v),
            _ => {
                for (o, x) in out.iter_mut().zip(self.nodes.nodes()) {
                    *o = self.model.value(*x, t)?;
                }
            }
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes on `[0, 1]`.
pub fn gauss_nodes() -> [f64; 3] {
    let r = 15f64.sqrt() / 10.0;
    [0.5 - r, 0.5, 0.5 + r]
}

/// Highest spatial derivative kept for `Ṽ₀, Ṽ₁, Ṽ₂`.
pub const DERIVATIVE_ORDERS: [u32; 3] = [4, 3, 2];

#[derive(Clone, Debug)]
pub struct QuadratureSample {
    pub t: f64,
    pub h: f64,
    /// `deriv[j][m] = ∂ₓᵐ Ṽⱼ`
    pub deriv: [Vec<GridField>; 3],
}

impl QuadratureSample {
    pub fn field(&self, j: usize) -> &GridField {
        &self.deriv[j][0]
    }

    pub fn derivative(&self, j: usize, m: usize) -> Option<&GridField> {
        self.deriv.get(j).and_then(|d| d.get(m))
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        self.deriv[0][0].grid()
    }
}

/// Samples `V` at `t + h·tⱼ` and forms `Ṽ₀ = V(t₂)`,
/// `Ṽ₁ = (√15/3h)(V(t₃) − V(t₁))`, `Ṽ₂ = (10/3h²)(V(t₃) − 2V(t₂) + V(t₁))`.
/// A negative `h` samples the interval `[t+h, t]` backwards.
pub fn sample_quadrature(
    model: &PotentialModel,
    t: f64,
    h: f64,
    grid: &Arc<SpatialGrid>,
) -> Result<QuadratureSample, EvalError> {
    assert!(h != 0.0 && h.is_finite(), "step must be nonzero");
    let [t1, t2, t3] = gauss_nodes();
    let v2 = model.evaluate_on_grid(t + h * t2, grid)?;
    let (v1t, v2t) = if model.is_time_independent() {
        (GridField::zeros(grid.clone()), GridField::zeros(grid.clone()))
    } else {
        let v1 = model.evaluate_on_grid(t + h * t1, grid)?;
        let v3 = model.evaluate_on_grid(t + h * t3, grid)?;
        let c1 = 15f64.sqrt() / (3.0 * h);
        let c2 = 10.0 / (3.0 * h * h);
        let a = v1.values();
        let b = v2.values();
        let c = v3.values();
        let first = (0..a.len()).map(|i| c1 * (c[i] - a[i])).collect();
        let second = (0..a.len()).map(|i| c2 * (c[i] - 2.0 * b[i] + a[i])).collect();
        (
            GridField::new(grid.clone(), first).expect("sizes agree"),
            GridField::new(grid.clone(), second).expect("sizes agree"),
        )
    };
    let table = |base: GridField, top: u32| -> Vec<GridField> {
        let mut out = Vec::with_capacity(top as usize + 1);
        let uniform = base.values().iter().all(|&v| v == base.values()[0]);
        for m in 1..=top {
            out.push(if uniform { GridField::zeros(grid.clone()) } else { base.differentiate(m) });
        }
        out.insert(0, base);
        out
    };
    Ok(QuadratureSample {
        t,
        h,
        deriv: [
            table(v2, DERIVATIVE_ORDERS[0]),
            table(v1t, DERIVATIVE_ORDERS[1]),
            table(v2t, DERIVATIVE_ORDERS[2]),
        ],
    })
}
