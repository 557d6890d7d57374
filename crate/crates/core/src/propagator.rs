//! Executable splitting steps: compile the symbolic exponents against a
//! quadrature sample and apply them to wave functions.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::exprparse::EvalError;
use crate::grid::{apply_jordan, GridField, SpatialGrid, WaveFunction};
use crate::potential::{sample_quadrature, PotentialModel, QuadratureSample};
use crate::symlie::{magnus_omega5, zassenhaus_split, LieElement, SplittingScheme, SymError};

#[derive(Debug, Error)]
pub enum PropagatorError {
    #[error("potential evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("symbolic derivation failed: {0}")]
    Symbolic(#[from] SymError),
    #[error("sample lacks derivative order {order} of V{slot}")]
    MissingDerivative { slot: u8, order: u8 },
    #[error("invalid time interval: t0={t0}, T={t_end}, h={h}")]
    BadInterval { t0: f64, t_end: f64, h: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Strang,
    Mid,
    Full,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::Strang, SchemeKind::Mid, SchemeKind::Full];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Strang => "strang",
            SchemeKind::Mid => "mid",
            SchemeKind::Full => "full",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "strang" => Ok(SchemeKind::Strang),
            "mid" => Ok(SchemeKind::Mid),
            "full" => Ok(SchemeKind::Full),
            _ => Err(format!("unknown scheme {s:?} (expected strang, mid or full)")),
        }
    }
}

fn full_scheme() -> &'static SplittingScheme {
    static SCHEME: OnceLock<SplittingScheme> = OnceLock::new();
    SCHEME.get_or_init(|| {
        let omega = magnus_omega5().expect("Ω5 derivation");
        zassenhaus_split(&omega, 2).expect("Zassenhaus split of Ω5")
    })
}

/// Symbolic splitting behind each scheme kind. Lower kinds drop the
/// innermost exponents and promote the last kept one to the centre.
pub fn symbolic_scheme(kind: SchemeKind) -> SplittingScheme {
    let full = full_scheme();
    match kind {
        SchemeKind::Full => full.clone(),
        SchemeKind::Mid => SplittingScheme { outer: full.outer[..2].to_vec(), central: full.outer[2].clone() },
        SchemeKind::Strang => SplittingScheme { outer: full.outer[..1].to_vec(), central: full.outer[1].clone() },
    }
}

/// Lanczos iteration counts for `W²` and `𝒲³`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepOptions {
    pub lanczos_w2: usize,
    pub lanczos_w3: usize,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self { lanczos_w2: 3, lanczos_w3: 2 }
    }
}

/// `Σₖ iᵏ⁺¹⟨k|gₖ⟩` with real fields `gₖ`, discretized as
/// `iᵏ⁺¹(D_g Kᵏ + Kᵏ D_g)/2`. Skew-Hermitian by construction.
#[derive(Clone, Debug)]
pub struct JordanOperator {
    grid: Arc<SpatialGrid>,
    terms: Vec<(u32, GridField)>,
}

fn i_pow(k: u32) -> Complex64 {
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)]
        [(k % 4) as usize]
}

impl JordanOperator {
    pub fn zero(grid: Arc<SpatialGrid>) -> Self {
        Self { grid, terms: Vec::new() }
    }

    /// Evaluates `weight·e` on the grid. Each term `iᵃ c hᵖ εᵉ ⟨k|f⟩` is
    /// rewritten as `iᵏ⁺¹⟨k|±c hᵖ εᵉ f⟩`.
    pub fn compile(
        element: &LieElement,
        sample: &QuadratureSample,
        eps: f64,
        h: f64,
        weight: f64,
    ) -> Result<Self, PropagatorError> {
        let grid = sample.grid().clone();
        let mut by_height: Vec<(u32, GridField)> = Vec::new();
        for (key, field) in element.entries() {
            let sign = match (key.i_exp as i64 - key.height as i64 - 1).rem_euclid(4) {
                0 => 1.0,
                2 => -1.0,
                _ => unreachable!("exponent without skew parity"),
            };
            let scalar = sign * weight * h.powi(key.h_exp as i32) * eps.powi(key.eps_exp);
            let mut columns: Vec<(u8, u8, &[f64])> = Vec::new();
            for (atoms, _) in field.monomials() {
                for a in atoms {
                    if !columns.iter().any(|c| c.0 == a.slot() && c.1 == a.order()) {
                        let f = sample
                            .derivative(a.slot() as usize, a.order() as usize)
                            .ok_or(PropagatorError::MissingDerivative { slot: a.slot(), order: a.order() })?;
                        columns.push((a.slot(), a.order(), f.values()));
                    }
                }
            }
            let values: Vec<f64> = (0..grid.len())
                .map(|n| {
                    scalar
                        * field.evaluate(|a| {
                            columns.iter().find(|c| c.0 == a.slot() && c.1 == a.order()).unwrap().2[n]
                        })
                })
                .collect();
            let g = GridField::new(grid.clone(), values).expect("grid sizes agree");
            match by_height.iter_mut().find(|(k, _)| *k == key.height) {
                Some((_, acc)) => acc.axpy(1.0, &g).expect("grid sizes agree"),
                None => by_height.push((key.height, g)),
            }
        }
        by_height.retain(|(_, g)| !g.is_zero());
        by_height.sort_by_key(|(k, _)| *k);
        Ok(Self { grid, terms: by_height })
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn terms(&self) -> &[(u32, GridField)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|(k, _)| *k == 0)
    }

    pub fn is_uniform(&self) -> bool {
        self.terms.iter().all(|(_, g)| g.values().iter().all(|&v| v == g.values()[0]))
    }

    pub fn apply(&self, v: &WaveFunction) -> WaveFunction {
        let mut out = WaveFunction::zeros(v.grid().clone());
        for (k, g) in &self.terms {
            let phase = i_pow(k + 1);
            let w = apply_jordan(*k, g, v).expect("operator and state share a grid");
            for (o, x) in out.values_mut().iter_mut().zip(w.values()) {
                *o += phase * x;
            }
        }
        out
    }

    /// `σ(κ) = Σₖ iᵏ⁺¹ gₖ (iκ)ᵏ` for uniform fields.
    fn symbol(&self, kappa: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(k, g)| i_pow(k + 1) * g.values()[0] * Complex64::new(0.0, kappa).powu(*k))
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Identity,
    Fourier,
    Diagonal,
    Lanczos(usize),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Identity => f.write_str("identity"),
            Method::Fourier => f.write_str("fourier"),
            Method::Diagonal => f.write_str("diagonal"),
            Method::Lanczos(m) => write!(f, "lanczos({m})"),
        }
    }
}

#[derive(Clone, Debug)]
enum Action {
    Identity,
    /// Multiplier per FFT slot.
    Fourier(Vec<Complex64>),
    Diagonal(Vec<Complex64>),
    Lanczos(JordanOperator, usize),
}

#[derive(Clone, Debug)]
pub struct Factor {
    /// `W⁰`, `W¹`, `W²` or the central `𝒲³`.
    pub label: String,
    pub weight: f64,
    pub method: Method,
    action: Action,
}

impl Factor {
    fn new(label: String, weight: f64, op: JordanOperator, lanczos: usize) -> Self {
        let grid = op.grid().clone();
        let (method, action) = if op.is_zero() {
            (Method::Identity, Action::Identity)
        } else if op.is_diagonal() {
            let g = &op.terms[0].1;
            (Method::Diagonal, Action::Diagonal(g.values().iter().map(|&v| Complex64::from_polar(1.0, v)).collect()))
        } else if op.is_uniform() {
            let mult = grid.wavenumbers().iter().map(|&k| op.symbol(k).exp()).collect();
            (Method::Fourier, Action::Fourier(mult))
        } else {
            (Method::Lanczos(lanczos), Action::Lanczos(op, lanczos))
        };
        Self { label, weight, method, action }
    }

    pub fn apply(&self, u: &mut WaveFunction) {
        match &self.action {
            Action::Identity => {}
            Action::Diagonal(d) => {
                for (x, m) in u.values_mut().iter_mut().zip(d) {
                    *x *= m;
                }
            }
            Action::Fourier(mult) => apply_fourier(u, mult),
            Action::Lanczos(op, m) => {
                *u = lanczos_exp_apply(|v| op.apply(v), u, *m);
            }
        }
    }

    /// Per-slot multiplier when the factor is a Fourier multiplier.
    pub fn fourier_multiplier(&self) -> Option<&[Complex64]> {
        match &self.action {
            Action::Fourier(m) => Some(m),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        let w = if self.weight == 0.5 { "½" } else { "" };
        format!("{w}{} {}", self.label, self.method)
    }
}

fn apply_fourier(u: &mut WaveFunction, mult: &[Complex64]) {
    let grid = u.grid().clone();
    let buf = u.values_mut();
    grid.forward(buf);
    let n = grid.len() as f64;
    for (x, m) in buf.iter_mut().zip(mult) {
        *x = *x * m / n;
    }
    grid.inverse(buf);
}

/// Palindromic sequence of exponential factors for one step.
#[derive(Clone, Debug)]
pub struct CompiledStep {
    pub factors: Vec<Factor>,
}

impl CompiledStep {
    pub fn apply(&self, u: &mut WaveFunction) {
        for f in &self.factors {
            f.apply(u);
        }
    }

    /// Labels with weights, e.g. `½W⁰`.
    pub fn labels(&self) -> Vec<String> {
        self.factors
            .iter()
            .map(|f| if f.weight == 0.5 { format!("½{}", f.label) } else { f.label.clone() })
            .collect()
    }
}

const OUTER_LABELS: [&str; 3] = ["W⁰", "W¹", "W²"];

pub fn compile_step(
    kind: SchemeKind,
    sample: &QuadratureSample,
    eps: f64,
    h: f64,
    opts: StepOptions,
) -> Result<CompiledStep, PropagatorError> {
    let scheme = symbolic_scheme(kind);
    let lanczos_for = |label: &str| if label == "W²" { opts.lanczos_w2 } else { opts.lanczos_w3 };
    let mut half = Vec::new();
    for (i, w) in scheme.outer.iter().enumerate() {
        let label = OUTER_LABELS[i].to_string();
        let op = JordanOperator::compile(w, sample, eps, h, 0.5)?;
        half.push(Factor::new(label.clone(), 0.5, op, lanczos_for(&label)));
    }
    let central_label = match kind {
        SchemeKind::Strang => "W¹",
        SchemeKind::Mid => "W²",
        SchemeKind::Full => "𝒲³",
    };
    let op = JordanOperator::compile(&scheme.central, sample, eps, h, 1.0)?;
    let central = Factor::new(central_label.to_string(), 1.0, op, lanczos_for(central_label));
    let mut factors = half.clone();
    factors.push(central);
    factors.extend(half.into_iter().rev());
    Ok(CompiledStep { factors })
}

/// `e^{A}v` for skew-Hermitian `A` from `m` Lanczos steps on `H = iA`:
/// `‖v‖·V_m e^{−iT_m} e₁`. Uses full reorthogonalization; on breakdown the
/// exponential is exact within the invariant subspace found so far.
pub fn lanczos_exp_apply<F>(op: F, v: &WaveFunction, m: usize) -> WaveFunction
where
    F: Fn(&WaveFunction) -> WaveFunction,
{
    assert!(m >= 1, "at least one Lanczos iteration");
    let norm = v.values().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return v.clone();
    }
    let grid = v.grid().clone();
    let dot = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>();
    let mut basis: Vec<Vec<Complex64>> = vec![v.values().iter().map(|c| c / norm).collect()];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut scale = 0.0f64;
    for j in 0..m {
        let q = WaveFunction::new(grid.clone(), basis[j].clone()).expect("same grid");
        let mut w: Vec<Complex64> = op(&q).into_values().into_iter().map(|c| Complex64::new(0.0, 1.0) * c).collect();
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let b = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        scale = scale.max(a.abs()).max(b);
        if j + 1 == m || b <= 1e-13 * scale {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|c| c / b).collect());
    }
    let d = alpha.len();
    let t = DMatrix::from_fn(d, d, |i, k| {
        if i == k {
            alpha[i]
        } else if i + 1 == k {
            beta[i]
        } else if k + 1 == i {
            beta[k]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let coeffs: Vec<Complex64> = (0..d)
        .map(|i| {
            (0..d)
                .map(|l| {
                    let q = &eig.eigenvectors;
                    Complex64::from_polar(1.0, -eig.eigenvalues[l]) * q[(i, l)] * q[(0, l)]
                })
                .sum::<Complex64>()
                * norm
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (c, b) in coeffs.iter().zip(&basis) {
        for (o, x) in out.iter_mut().zip(b) {
            *o += c * x;
        }
    }
    WaveFunction::new(grid, out).expect("same grid")
}

/// One step over `[t, t+h]`. A negative `h` steps backwards over `[t+h, t]`.
pub fn step_once(
    u: &WaveFunction,
    t: f64,
    h: f64,
    kind: SchemeKind,
    model: &PotentialModel,
    eps: f64,
    opts: StepOptions,
) -> Result<WaveFunction, PropagatorError> {
    let sample = sample_quadrature(model, t, h, u.grid())?;
    let step = compile_step(kind, &sample, eps, h, opts)?;
    let mut out = u.clone();
    step.apply(&mut out);
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct EvolveReport {
    pub state: WaveFunction,
    pub steps: usize,
    /// `‖uₙ‖ − ‖u₀‖` after every step.
    pub norm_drift: Vec<f64>,
    pub max_norm_drift: f64,
    pub seconds: f64,
    pub snapshots: Vec<(f64, WaveFunction)>,
}

/// Steps from `t0` to `t_end` with step `h`, shortening the last step to land
/// on `t_end`. Snapshots are taken every `snapshot_every` steps (0 disables).
#[allow(clippy::too_many_arguments)]
pub fn evolve(
    u0: &WaveFunction,
    t0: f64,
    t_end: f64,
    h: f64,
    kind: SchemeKind,
    model: &PotentialModel,
    eps: f64,
    opts: StepOptions,
    snapshot_every: usize,
) -> Result<EvolveReport, PropagatorError> {
    if !(h > 0.0) || !(t_end >= t0) || !t0.is_finite() || !t_end.is_finite() {
        return Err(PropagatorError::BadInterval { t0, t_end, h });
    }
    let start = Instant::now();
    let n0 = u0.l2_norm();
    let mut u = u0.clone();
    let mut t = t0;
    let mut steps = 0;
    let mut drift = Vec::new();
    let mut snapshots = Vec::new();
    let total = ((t_end - t0) / h).ceil() as usize;
    // The trailing Fourier factor of one step is merged with the leading one
    // of the next, halving the FFT round trips (and their rounding drift).
    let mut pending: Option<Vec<Complex64>> = None;
    for s in 0..total {
        let dt = if s + 1 == total { t_end - t } else { h };
        if dt <= 0.0 {
            break;
        }
        let sample = sample_quadrature(model, t, dt, u.grid())?;
        let step = compile_step(kind, &sample, eps, dt, opts)?;
        let (first, rest) = step.factors.split_first().expect("a step has factors");
        match (pending.take(), first.fourier_multiplier()) {
            (Some(p), Some(m)) => {
                let merged: Vec<Complex64> = p.iter().zip(m).map(|(a, b)| a * b).collect();
                apply_fourier(&mut u, &merged);
            }
            (Some(p), None) => {
                apply_fourier(&mut u, &p);
                first.apply(&mut u);
            }
            (None, _) => first.apply(&mut u),
        }
        match rest.split_last() {
            Some((last, middle)) if last.fourier_multiplier().is_some() => {
                middle.iter().for_each(|f| f.apply(&mut u));
                pending = last.fourier_multiplier().map(<[Complex64]>::to_vec);
            }
            _ => rest.iter().for_each(|f| f.apply(&mut u)),
        }
        t = if s + 1 == total { t_end } else { t0 + (s + 1) as f64 * h };
        steps += 1;
        drift.push(u.l2_norm() - n0);
        if snapshot_every > 0 && steps % snapshot_every == 0 {
            if let Some(p) = pending.take() {
                apply_fourier(&mut u, &p);
            }
            snapshots.push((t, u.clone()));
        }
    }
    if let Some(p) = pending.take() {
        apply_fourier(&mut u, &p);
        if let Some(d) = drift.last_mut() {
            *d = u.l2_norm() - n0;
        }
    }
    let max_norm_drift = drift.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    Ok(EvolveReport { state: u, steps, norm_drift: drift, max_norm_drift, seconds: start.elapsed().as_secs_f64(), snapshots })
}

/// `(2/M)·Σ_{xₙ>0}|uₙ|²`.
pub fn transmitted_mass(u: &WaveFunction) -> f64 {
    let m = u.grid().len() as f64;
    u.grid()
        .nodes()
        .iter()
        .zip(u.values())
        .filter(|(x, _)| **x > 0.0)
        .map(|(_, c)| c.norm_sqr())
        .sum::<f64>()
        * 2.0
        / m
}
