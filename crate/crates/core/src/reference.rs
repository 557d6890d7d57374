//! Reference solutions: Strang splitting with the potential frozen at each
//! step midpoint, on a fine grid with a fine step, refined until converged.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::exprparse::EvalError;
use crate::grid::{l2_norm, linf_norm, spectral_tail_mass, SpatialGrid, WaveFunction};
use crate::potential::{GridSampler, PotentialModel};

#[derive(Debug, Error)]
pub enum ReferenceError {
    #[error("potential evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error(
        "reference did not converge after {refinements} refinements: M_R={m_r}, h_R={h_r:e}, \
         tail mass {tail:e}, last change {change:e}"
    )]
    NotConverged { refinements: usize, m_r: usize, h_r: f64, tail: f64, change: f64 },
    #[error("invalid reference configuration: {0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceConfig {
    pub h_r: f64,
    /// Odd grid size.
    pub m_r: usize,
    pub refinement_factor: usize,
    pub max_refinements: usize,
    /// Required l2 agreement between successive refinements.
    pub tolerance: f64,
    /// Combine solutions at `h_R` and `h_R/2` as `(4u_{h/2} − u_h)/3`,
    /// cancelling the leading `h²` error of the symmetric splitting.
    pub extrapolate: bool,
}

impl ReferenceConfig {
    /// `h_R = h/200`, `M_R = 3M`.
    pub fn for_scheme(h: f64, m: usize, tolerance: f64) -> Self {
        Self {
            h_r: h / 200.0,
            m_r: 3 * (m / 2) * 2 + 1,
            refinement_factor: 2,
            max_refinements: 3,
            tolerance,
            extrapolate: false,
        }
    }

    fn validate(&self) -> Result<(), ReferenceError> {
        if !(self.h_r > 0.0) {
            return Err(ReferenceError::Config(format!("h_R must be positive, got {}", self.h_r)));
        }
        if self.m_r % 2 == 0 || self.m_r < 3 {
            return Err(ReferenceError::Config(format!("M_R must be odd and ≥ 3, got {}", self.m_r)));
        }
        if self.refinement_factor < 2 {
            return Err(ReferenceError::Config("refinement factor must be ≥ 2".into()));
        }
        Ok(())
    }
}

/// `e^{½ihεK²}` as a multiplier per FFT slot, including the `1/M` of the
/// inverse transform.
fn kinetic_multiplier(grid: &SpatialGrid, eps: f64, h: f64) -> Vec<Complex64> {
    let scale = 1.0 / grid.len() as f64;
    grid.wavenumbers().iter().map(|k| Complex64::from_polar(scale, -eps * h * k * k)).collect()
}

fn apply_multiplier(grid: &SpatialGrid, buf: &mut [Complex64], mult: &[Complex64]) {
    grid.forward(buf);
    for (x, m) in buf.iter_mut().zip(mult) {
        *x *= m;
    }
    grid.inverse(buf);
}

fn apply_potential(
    sampler: &GridSampler<'_>,
    scratch: &mut [f64],
    buf: &mut [Complex64],
    t_mid: f64,
    h: f64,
    eps: f64,
) -> Result<(), EvalError> {
    sampler.eval_into(t_mid, scratch)?;
    for (v, u) in scratch.iter().zip(buf.iter_mut()) {
        *u *= Complex64::from_polar(1.0, -h * v / eps);
    }
    Ok(())
}

/// `e^{½ihεK²} e^{−ihε⁻¹D_{V(t+h/2)}} e^{½ihεK²} u`.
pub fn strang_step(
    u: &WaveFunction,
    t: f64,
    h: f64,
    model: &PotentialModel,
    eps: f64,
) -> Result<WaveFunction, EvalError> {
    let grid = u.grid().clone();
    let half = kinetic_multiplier(&grid, eps, 0.5 * h);
    let mut buf = u.values().to_vec();
    apply_multiplier(&grid, &mut buf, &half);
    let mut scratch = vec![0.0; grid.len()];
    apply_potential(&GridSampler::new(model, &grid), &mut scratch, &mut buf, t + 0.5 * h, h, eps)?;
    apply_multiplier(&grid, &mut buf, &half);
    Ok(WaveFunction::new(grid, buf).expect("same grid"))
}

/// Strang steps from `t0` to `t_end`; consecutive half kinetic factors are
/// merged, and the last step is shortened to land on `t_end`.
pub fn strang_evolve(
    u0: &WaveFunction,
    t0: f64,
    t_end: f64,
    h: f64,
    model: &PotentialModel,
    eps: f64,
) -> Result<WaveFunction, EvalError> {
    let grid = u0.grid().clone();
    let steps = ((t_end - t0) / h).ceil().max(0.0) as usize;
    if steps == 0 {
        return Ok(u0.clone());
    }
    let last = t_end - t0 - (steps - 1) as f64 * h;
    let half = kinetic_multiplier(&grid, eps, 0.5 * h);
    let full = kinetic_multiplier(&grid, eps, h);
    let mut buf = u0.values().to_vec();
    let sampler = GridSampler::new(model, &grid);
    let mut scratch = vec![0.0; grid.len()];
    apply_multiplier(&grid, &mut buf, &half);
    for s in 0..steps {
        let t = t0 + s as f64 * h;
        let dt = if s + 1 == steps { last } else { h };
        apply_potential(&sampler, &mut scratch, &mut buf, t + 0.5 * dt, dt, eps)?;
        if s + 2 < steps {
            apply_multiplier(&grid, &mut buf, &full);
        } else if s + 2 == steps {
            // half of this step plus half of the shortened last one
            apply_multiplier(&grid, &mut buf, &kinetic_multiplier(&grid, eps, 0.5 * (h + last)));
        } else {
            apply_multiplier(&grid, &mut buf, &kinetic_multiplier(&grid, eps, 0.5 * last));
        }
    }
    Ok(WaveFunction::new(grid, buf).expect("same grid"))
}

#[derive(Clone, Debug)]
pub struct ReferenceSolution {
    pub state: WaveFunction,
    pub m_r: usize,
    pub h_r: f64,
    /// Mass fraction in the top 10% of Fourier modes.
    pub tail_mass: f64,
    /// l2 change against the previous refinement (infinite on the first).
    pub change: f64,
    pub refinements: usize,
}

fn solve_at<F>(init: &F, model: &PotentialModel, eps: f64, t0: f64, t_end: f64, m: usize, h: f64, extrapolate: bool) -> Result<WaveFunction, EvalError>
where
    F: Fn(&Arc<SpatialGrid>) -> WaveFunction,
{
    let grid = SpatialGrid::with_size(m).expect("odd size");
    let u0 = init(&grid);
    let coarse = strang_evolve(&u0, t0, t_end, h, model, eps)?;
    if !extrapolate {
        return Ok(coarse);
    }
    let fine = strang_evolve(&u0, t0, t_end, 0.5 * h, model, eps)?;
    let values = fine.values().iter().zip(coarse.values()).map(|(f, c)| (4.0 * f - c) / 3.0).collect();
    Ok(WaveFunction::new(grid, values).expect("same grid"))
}

/// Refines `(M_R, h_R)` by the configured factor until the spectral tail
/// holds less than `1e−12` of the mass and two successive solutions agree
/// to `cfg.tolerance` in l2.
pub fn solve_reference<F>(
    model: &PotentialModel,
    init: F,
    eps: f64,
    t0: f64,
    t_end: f64,
    cfg: &ReferenceConfig,
) -> Result<ReferenceSolution, ReferenceError>
where
    F: Fn(&Arc<SpatialGrid>) -> WaveFunction,
{
    cfg.validate()?;
    let mut m = cfg.m_r;
    let mut h = cfg.h_r;
    let mut previous: Option<WaveFunction> = None;
    let mut tail = f64::INFINITY;
    let mut change = f64::INFINITY;
    for refinement in 0..=cfg.max_refinements {
        let u = solve_at(&init, model, eps, t0, t_end, m, h, cfg.extrapolate)?;
        tail = spectral_tail_mass(&u, 0.1);
        if let Some(prev) = &previous {
            change = error_against_reference(prev, &u).l2;
        }
        let exact_in_time = model.is_time_independent() && is_uniform_potential(model);
        if tail < 1e-12 && (change <= cfg.tolerance || (exact_in_time && previous.is_none())) {
            return Ok(ReferenceSolution { state: u, m_r: m, h_r: h, tail_mass: tail, change, refinements: refinement });
        }
        if refinement == cfg.max_refinements {
            break;
        }
        previous = Some(u);
        m = cfg.refinement_factor * (m / 2) * 2 + 1;
        h /= cfg.refinement_factor as f64;
    }
    Err(ReferenceError::NotConverged { refinements: cfg.max_refinements, m_r: m, h_r: h, tail, change })
}

/// Zero and constant potentials make the splitting exact, so a single
/// resolution suffices once the spectrum is resolved.
fn is_uniform_potential(model: &PotentialModel) -> bool {
    matches!(model, PotentialModel::Zero | PotentialModel::Constant(_))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub linf: f64,
}

/// Truncates `reference` to the modes of `u`'s grid and measures `u − ref`.
pub fn error_against_reference(u: &WaveFunction, reference: &WaveFunction) -> ErrorNorms {
    let coarse = if reference.grid().len() == u.grid().len() {
        reference.clone()
    } else {
        reference.resample_onto(u.grid())
    };
    let diff: Vec<Complex64> = u.values().iter().zip(coarse.values()).map(|(a, b)| a - b).collect();
    ErrorNorms { l2: l2_norm(&diff), linf: linf_norm(&diff) }
}
