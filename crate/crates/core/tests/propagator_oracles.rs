use std::f64::consts::PI;
use std::sync::Arc;

use mzs_core::exprparse::parse_expr;
use mzs_core::grid::{gaussian_wave_packet, SpatialGrid, WaveFunction};
use mzs_core::oracle::{apply_matrix, assemble, expm, random_skew_hermitian};
use mzs_core::potential::{sample_quadrature, PotentialModel};
use mzs_core::propagator::{
    compile_step, evolve, lanczos_exp_apply, step_once, symbolic_scheme, transmitted_mass, JordanOperator, SchemeKind,
    StepOptions,
};
use mzs_core::reference::strang_evolve;
use mzs_core::symlie::magnus_omega5;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn smooth_model() -> PotentialModel {
    PotentialModel::Expr(parse_expr("cos(pi*x)*(1 + t) + 0.5*sin(2*pi*x - t)").unwrap())
}

fn diff(a: &WaveFunction, b: &WaveFunction) -> f64 {
    a.sub(b).unwrap().l2_norm()
}

#[test]
fn lanczos_matches_dense_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid = SpatialGrid::new(16);
    let a = random_skew_hermitian(&mut rng, grid.len(), 1.0);
    let v = WaveFunction::from_fn(grid.clone(), |x| Complex64::new((PI * x).cos(), x));
    let want = apply_matrix(&expm(&a), &v);
    let got = lanczos_exp_apply(|w| apply_matrix(&a, w), &v, 10);
    let err = diff(&got, &want) / v.l2_norm();
    assert!(err <= 1e-10, "{err:e}");
    assert!((got.l2_norm() - v.l2_norm()).abs() <= 1e-12);
}

#[test]
fn lanczos_breakdown_returns_subspace_exponential() {
    // A two-mode vector spans an invariant subspace of K², so m = 5 breaks down at step 2.
    let grid = SpatialGrid::new(16);
    let v = WaveFunction::from_fn(grid.clone(), |x| Complex64::from_polar(1.0, PI * x) + Complex64::from_polar(0.5, -3.0 * PI * x));
    let lap = |w: &WaveFunction| {
        let mut d = w.differentiate(2);
        d.values_mut().iter_mut().for_each(|c| *c *= Complex64::new(0.0, 0.01));
        d
    };
    let got = lanczos_exp_apply(lap, &v, 5);
    let want = WaveFunction::from_fn(grid, |x| {
        Complex64::from_polar(1.0, PI * x - 0.01 * PI * PI) + Complex64::from_polar(0.5, -3.0 * PI * x - 0.09 * PI * PI)
    });
    assert!(diff(&got, &want) <= 1e-12);
}

#[test]
fn free_mode_is_exact_for_every_scheme() {
    let eps = 2f64.powi(-6);
    let h = 2.0 * eps;
    let grid = SpatialGrid::with_size(65).unwrap();
    let u = WaveFunction::from_fn(grid.clone(), |x| Complex64::from_polar(1.0, PI * x));
    let want = WaveFunction::from_fn(grid, |x| Complex64::from_polar(1.0, PI * x - eps * PI * PI * h));
    for kind in SchemeKind::ALL {
        let got = step_once(&u, 0.3, h, kind, &PotentialModel::Zero, eps, StepOptions::default()).unwrap();
        assert!(diff(&got, &want) <= 1e-12, "{kind}");
    }
}

#[test]
fn constant_potential_is_a_pure_phase() {
    let eps = 2f64.powi(-5);
    let h = 2.0 * eps;
    let c = 0.7;
    let grid = SpatialGrid::with_size(33).unwrap();
    let u = WaveFunction::from_fn(grid.clone(), |x| Complex64::new((PI * x).cos(), (2.0 * PI * x).sin()));
    let mut want = step_once(&u, 0.0, h, SchemeKind::Strang, &PotentialModel::Zero, eps, StepOptions::default()).unwrap();
    want.values_mut().iter_mut().for_each(|z| *z *= Complex64::from_polar(1.0, -c * h / eps));
    for kind in SchemeKind::ALL {
        let got = step_once(&u, 0.0, h, kind, &PotentialModel::Constant(c), eps, StepOptions::default()).unwrap();
        assert!(diff(&got, &want) <= 1e-12, "{kind}");
    }
}

#[test]
fn norm_is_preserved_over_a_thousand_steps() {
    let eps = 2f64.powi(-6);
    let grid = SpatialGrid::with_size(321).unwrap();
    let u0 = gaussian_wave_packet(grid, -0.3, 0.1, 1.22e-4).unwrap();
    let h = 2.0 * eps;
    let report = evolve(&u0, 0.0, 1000.0 * h, h, SchemeKind::Full, &PotentialModel::LatticeWithPulse, eps, StepOptions::default(), 0)
        .unwrap();
    assert_eq!(report.steps, 1000);
    assert!(report.max_norm_drift <= 1e-12, "{:e}", report.max_norm_drift);
}

#[test]
fn reversed_step_recovers_the_input() {
    // Reversibility holds up to the Lanczos error, which needs a resolved Krylov space.
    let eps = 2f64.powi(-8);
    let h = 2.0 * eps;
    let grid = SpatialGrid::with_size(1281).unwrap();
    let u = gaussian_wave_packet(grid, -0.3, 0.1, 1.22e-4).unwrap();
    let model = smooth_model();
    for kind in SchemeKind::ALL {
        let fwd = step_once(&u, 0.25, h, kind, &model, eps, StepOptions::default()).unwrap();
        let back = step_once(&fwd, 0.25 + h, -h, kind, &model, eps, StepOptions::default()).unwrap();
        let err = diff(&back, &u);
        assert!(err <= 1e-10, "{kind}: {err:e}");
    }
}

#[test]
fn time_reversed_model_undoes_an_evolution() {
    let eps = 2f64.powi(-8);
    let h = 2.0 * eps;
    let t_end = 8.0 * h;
    let grid = SpatialGrid::with_size(1281).unwrap();
    let u0 = gaussian_wave_packet(grid, -0.3, 0.1, 1.22e-4).unwrap();
    let model = smooth_model();
    let reversed = PotentialModel::TimeReversed { inner: Box::new(model.clone()), pivot: t_end };
    for kind in SchemeKind::ALL {
        let fwd = evolve(&u0, 0.0, t_end, h, kind, &model, eps, StepOptions::default(), 0).unwrap().state;
        // Conjugation reverses the direction of the flow.
        let back = evolve(&fwd.conj(), 0.0, t_end, h, kind, &reversed, eps, StepOptions::default(), 0).unwrap().state.conj();
        let err = diff(&back, &u0);
        assert!(err <= 1e-10, "{kind}: {err:e}");
    }
}

/// Dense `exp` of the discretized `Ω₅` against one full step, both on `M` nodes.
fn omega5_defect(model: &PotentialModel, eps: f64, m: usize, u: &WaveFunction, opts: StepOptions) -> f64 {
    let grid = u.grid().clone();
    let h = 2.0 * eps;
    let sample = sample_quadrature(model, 0.1, h, &grid).unwrap();
    let omega = JordanOperator::compile(&magnus_omega5().unwrap(), &sample, eps, h, 1.0).unwrap();
    let exact = apply_matrix(&expm(&assemble(&grid, |v| omega.apply(v))), u);
    assert_eq!(grid.len(), m);
    let got = step_once(u, 0.1, h, SchemeKind::Full, model, eps, opts).unwrap();
    diff(&got, &exact)
}

#[test]
fn full_step_approaches_dense_omega5_at_sixth_order() {
    let model = PotentialModel::Expr(parse_expr("cos(pi*x)*(1 + t)").unwrap());
    let mut errs = Vec::new();
    for p in [5, 6, 7] {
        let eps = 2f64.powi(-p);
        let grid = SpatialGrid::with_size(((3.0 / eps).ceil() as usize) | 1).unwrap();
        let u = gaussian_wave_packet(grid.clone(), -0.1, 0.05, 0.03125 * eps).unwrap();
        errs.push(omega5_defect(&model, eps, grid.len(), &u, StepOptions::default()));
    }
    let rate = (errs[0] / errs[2]).log2() / 2.0;
    assert!(rate >= 5.5, "errors {errs:?}, rate {rate:.2}");
}

#[test]
fn lanczos_w2_factor_is_within_eps_to_the_sixth() {
    // Wide packet on a smooth potential; the lattice at ε = 2⁻⁴ is far outside this regime.
    let eps = 2f64.powi(-4);
    let h = 2.0 * eps;
    let grid = SpatialGrid::with_size(33).unwrap();
    let model = PotentialModel::Expr(parse_expr("cos(pi*x)*(1 + t)").unwrap());
    let sample = sample_quadrature(&model, 0.1, h, &grid).unwrap();
    let w2 = &symbolic_scheme(SchemeKind::Full).outer[2];
    let op = JordanOperator::compile(w2, &sample, eps, h, 0.5).unwrap();
    let u = gaussian_wave_packet(grid.clone(), 0.0, 0.0, 0.05).unwrap();
    let dense = apply_matrix(&expm(&assemble(&grid, |v| op.apply(v))), &u);
    let got = lanczos_exp_apply(|v| op.apply(v), &u, 3);
    let err = diff(&got, &dense);
    assert!(err <= eps.powi(6), "{err:e} > {:e}", eps.powi(6));
}

#[test]
fn compiled_factor_sequence_is_palindromic() {
    let eps = 2f64.powi(-4);
    let grid = SpatialGrid::with_size(81).unwrap();
    let sample = sample_quadrature(&PotentialModel::LatticeWithPulse, 0.3, 2.0 * eps, &grid).unwrap();
    let step = compile_step(SchemeKind::Full, &sample, eps, 2.0 * eps, StepOptions::default()).unwrap();
    let labels = step.labels();
    assert_eq!(labels, ["½W⁰", "½W¹", "½W²", "𝒲³", "½W²", "½W¹", "½W⁰"]);
    let described: Vec<String> = step.factors.iter().map(|f| f.describe()).collect();
    assert!(described[2].contains("lanczos(3)") && described[3].contains("lanczos(2)"), "{described:?}");
}

#[test]
fn pulse_pushes_mass_across_the_lattice() {
    // Judged on the fine Strang solution; the margin is small (a few 1e-4).
    let eps = 2f64.powi(-8);
    let grid = SpatialGrid::with_size(1281).unwrap();
    let u0 = gaussian_wave_packet(grid, -0.3, 0.1, 1.22e-4).unwrap();
    let run = |model: PotentialModel| transmitted_mass(&strang_evolve(&u0, 0.0, 0.75, eps / 25.0, &model, eps).unwrap());
    let with = run(PotentialModel::LatticeWithPulse);
    let without = run(PotentialModel::Lattice);
    assert!(with > without, "with {with} without {without}");
}

fn small_grid() -> Arc<SpatialGrid> {
    SpatialGrid::with_size(41).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn every_step_is_unitary(a in -1.0f64..1.0, b in -1.0f64..1.0, t in 0.0f64..1.0, kind in 0usize..3) {
        let model = PotentialModel::Expr(parse_expr(&format!("{a}*cos(pi*x - t) + {b}*sin(2*pi*x)*t")).unwrap());
        let u = gaussian_wave_packet(small_grid(), 0.1, 0.0, 0.02).unwrap();
        let eps = 2f64.powi(-4);
        let out = step_once(&u, t, 2.0 * eps, SchemeKind::ALL[kind], &model, eps, StepOptions::default()).unwrap();
        prop_assert!((out.l2_norm() - u.l2_norm()).abs() <= 1e-12);
    }
}
