//! Single runs, references and convergence sweeps.

use std::sync::Arc;
use std::time::Instant;

use mzs_core::grid::{gaussian_wave_packet, spectral_tail_mass, SpatialGrid, WaveFunction};
use mzs_core::propagator::{evolve, EvolveReport, PropagatorError, SchemeKind};
use mzs_core::reference::{error_against_reference, solve_reference, ReferenceConfig, ReferenceError, ReferenceSolution};
use mzs_core::stats::loglog_slope;
use rayon::prelude::*;

use crate::config::{odd_ceil, RunConfig, Sweep};

pub fn initial_state(cfg: &RunConfig, grid: &Arc<SpatialGrid>) -> WaveFunction {
    let g = &cfg.initial;
    gaussian_wave_packet(grid.clone(), g.x0, g.k0, g.delta).expect("delta validated positive")
}

/// Evolves the configured initial state with step `h` on `m` nodes.
pub fn run_with(cfg: &RunConfig, h: f64, m: usize, scheme: SchemeKind) -> Result<(WaveFunction, EvolveReport), PropagatorError> {
    let grid = SpatialGrid::with_size(m).expect("odd grid size");
    let u0 = initial_state(cfg, &grid);
    let report = evolve(&u0, 0.0, cfg.t_end, h, scheme, &cfg.potential, cfg.epsilon, cfg.lanczos, cfg.snapshot_every)?;
    Ok((u0, report))
}

pub fn run(cfg: &RunConfig) -> Result<(WaveFunction, EvolveReport), PropagatorError> {
    run_with(cfg, cfg.step(), cfg.grid_size(), cfg.scheme)
}

/// Reference for a scheme run with step `h` on `m` nodes.
pub fn reference_for(cfg: &RunConfig, h: f64, m: usize) -> Result<ReferenceSolution, ReferenceError> {
    let r = &cfg.reference;
    let rc = ReferenceConfig {
        h_r: h / r.h_ratio,
        m_r: odd_ceil((r.m_ratio * m) as f64),
        refinement_factor: r.refinement_factor,
        max_refinements: r.max_refinements,
        tolerance: r.tolerance,
        extrapolate: r.extrapolate,
    };
    solve_reference(&cfg.potential, |g: &Arc<SpatialGrid>| initial_state(cfg, g), cfg.epsilon, 0.0, cfg.t_end, &rc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub eps: f64,
    pub h: f64,
    pub m: usize,
    pub l2_error: f64,
    pub linf_error: f64,
    /// Scheme time plus (for ε sweeps) this row's reference time.
    pub seconds: f64,
    pub reference_m: usize,
    pub initial_tail: f64,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub scheme: SchemeKind,
    pub rows: Vec<Row>,
    /// `(case label, reason)` for rows that could not be computed.
    pub skipped: Vec<(String, String)>,
    pub by_epsilon: bool,
    pub seconds: f64,
}

impl SweepResult {
    fn abscissa(&self) -> Vec<f64> {
        self.rows.iter().map(|r| if self.by_epsilon { r.eps } else { r.h }).collect()
    }

    pub fn l2_slope(&self) -> f64 {
        loglog_slope(&self.abscissa(), &self.rows.iter().map(|r| r.l2_error).collect::<Vec<_>>())
    }

    pub fn linf_slope(&self) -> f64 {
        loglog_slope(&self.abscissa(), &self.rows.iter().map(|r| r.linf_error).collect::<Vec<_>>())
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("eps,h,M,l2_error,linf_error,seconds\n");
        for r in &self.rows {
            s += &format!("{:e},{:e},{},{:e},{:e},{:.3}\n", r.eps, r.h, r.m, r.l2_error, r.linf_error, r.seconds);
        }
        for (case, why) in &self.skipped {
            s += &format!("# skipped {case}: {why}\n");
        }
        let axis = if self.by_epsilon { "eps" } else { "h" };
        if self.rows.len() >= 2 {
            s += &format!("# scheme {}\n# slope l2 vs {axis}: {:.4}\n# slope linf vs {axis}: {:.4}\n", self.scheme, self.l2_slope(), self.linf_slope());
        }
        s
    }
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool")
}

fn measure(cfg: &RunConfig, h: f64, m: usize, scheme: SchemeKind, reference: &ReferenceSolution, extra: f64) -> Result<Row, String> {
    let start = Instant::now();
    let (u0, report) = run_with(cfg, h, m, scheme).map_err(|e| e.to_string())?;
    let e = error_against_reference(&report.state, &reference.state);
    Ok(Row {
        eps: cfg.epsilon,
        h,
        m,
        l2_error: e.l2,
        linf_error: e.linf,
        seconds: start.elapsed().as_secs_f64() + extra,
        reference_m: reference.m_r,
        initial_tail: spectral_tail_mass(&u0, 0.1),
    })
}

/// Errors against converged references for every `ε` (with `h`, `M`
/// derived from the config ratios), in list order.
pub fn epsilon_sweep(base: &RunConfig, eps_list: &[f64], schemes: &[SchemeKind], jobs: usize) -> Vec<SweepResult> {
    let start = Instant::now();
    let cases: Vec<Result<(RunConfig, ReferenceSolution, f64), String>> = pool(jobs).install(|| {
        eps_list
            .par_iter()
            .map(|&eps| {
                let cfg = base.at_epsilon(eps);
                let t = Instant::now();
                let r = reference_for(&cfg, cfg.step(), cfg.grid_size()).map_err(|e| e.to_string())?;
                Ok((cfg, r, t.elapsed().as_secs_f64()))
            })
            .collect()
    });
    let mut out = Vec::new();
    for &scheme in schemes {
        let results: Vec<Result<Row, String>> = pool(jobs).install(|| {
            cases
                .par_iter()
                .map(|c| {
                    let (cfg, r, secs) = c.as_ref().map_err(Clone::clone)?;
                    measure(cfg, cfg.step(), cfg.grid_size(), scheme, r, *secs)
                })
                .collect()
        });
        out.push(collect(scheme, true, eps_list.iter().map(|e| format!("eps={e:e}")).collect(), results, start));
    }
    out
}

/// Errors at fixed `ε` for every step in `h_list` against one reference
/// built for the smallest step.
pub fn step_sweep(cfg: &RunConfig, h_list: &[f64], schemes: &[SchemeKind], jobs: usize) -> Result<Vec<SweepResult>, ReferenceError> {
    let start = Instant::now();
    let m = cfg.grid_size();
    let h_min = h_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let reference = reference_for(cfg, h_min, m)?;
    let mut out = Vec::new();
    for &scheme in schemes {
        let results: Vec<Result<Row, String>> =
            pool(jobs).install(|| h_list.par_iter().map(|&h| measure(cfg, h, m, scheme, &reference, 0.0)).collect());
        out.push(collect(scheme, false, h_list.iter().map(|h| format!("h={h:e}")).collect(), results, start));
    }
    Ok(out)
}

fn collect(scheme: SchemeKind, by_epsilon: bool, labels: Vec<String>, results: Vec<Result<Row, String>>, start: Instant) -> SweepResult {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (label, r) in labels.into_iter().zip(results) {
        match r {
            Ok(row) => rows.push(row),
            Err(why) => {
                eprintln!("skipping {label}: {why}");
                skipped.push((label, why));
            }
        }
    }
    SweepResult { scheme, rows, skipped, by_epsilon, seconds: start.elapsed().as_secs_f64() }
}

pub fn sweep(cfg: &RunConfig, sweep: &Sweep, schemes: &[SchemeKind], jobs: usize) -> Result<Vec<SweepResult>, ReferenceError> {
    match sweep {
        Sweep::Epsilon(list) => Ok(epsilon_sweep(cfg, list, schemes, jobs)),
        Sweep::Step(list) => step_sweep(cfg, list, schemes, jobs),
    }
}
