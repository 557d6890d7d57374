//! Self-verification: the symbolic goldens, the dense sBCH oracle and the
//! skew-Hermitian discretization check, as a list of pass/fail results.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{apply_jordan, GridField, SpatialGrid, WaveFunction};
use crate::oracle::{assemble, sbch_residual_order, skew_hermitian_defect};
use crate::potential::QuadratureSample;
use crate::propagator::JordanOperator;
use crate::symlie::table::SUPPORTED_PAIRS;
use crate::symlie::{commute, quadrature_letters, AlgebraTerm, LieElement, Rules, SbchTable, SymError};

pub mod golden {
    //! Closed forms of `Ω₅`, its commutators and its splitting.

    use crate::symlie::{AlgebraTerm, DerivativeAtom, LieElement, Monomial, Rational, ScalarField};

    pub fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    /// Field from `(coeff, [(slot, order), ...])` monomials.
    pub fn field(monos: &[(i64, &[(u8, u8)])]) -> ScalarField {
        ScalarField::from_monomials(monos.iter().map(|(c, atoms)| {
            Monomial::new(q(*c, 1), atoms.iter().map(|&(s, o)| DerivativeAtom::new(s, o).unwrap()).collect())
        }))
    }

    /// `∂ᵒṼₛ`
    pub fn d(slot: u8, order: u8) -> ScalarField {
        ScalarField::derivative(slot, order)
    }

    pub fn term(c: Rational, i: u32, h: u32, e: i32, k: u32, f: ScalarField) -> AlgebraTerm {
        AlgebraTerm::new(c, i, h, e, k, f)
    }

    pub fn elem(terms: Vec<AlgebraTerm>) -> LieElement {
        LieElement::from_terms(terms)
    }

    /// `[B₁,B₂]`, `[B₁,B₃]`, `[B₁,[B₁,B₂]]`, `[B₂,[B₁,B₂]]`, `[B₁,[B₁,B₃]]`,
    /// `[B₁,[B₁,[B₁,B₂]]]` in that order.
    pub fn commutator_series() -> Vec<LieElement> {
        vec![
            elem(vec![term(q(2, 1), 0, 3, 0, 1, d(1, 1))]),
            elem(vec![term(q(2, 1), 0, 4, 0, 1, d(2, 1))]),
            elem(vec![
                term(q(4, 1), 1, 4, 1, 2, d(1, 2)),
                term(q(-1, 1), 1, 4, 1, 0, d(1, 4)),
                term(q(2, 1), 1, 4, -1, 0, field(&[(1, &[(1, 1), (0, 1)])])),
            ]),
            elem(vec![term(q(2, 1), 1, 5, -1, 0, field(&[(1, &[(1, 1), (1, 1)])]))]),
            elem(vec![
                term(q(4, 1), 1, 5, 1, 2, d(2, 2)),
                term(q(-1, 1), 1, 5, 1, 0, d(2, 4)),
                term(q(2, 1), 1, 5, -1, 0, field(&[(1, &[(2, 1), (0, 1)])])),
            ]),
            elem(vec![
                term(q(-8, 1), 0, 5, 2, 3, d(1, 3)),
                term(q(6, 1), 0, 5, 2, 1, d(1, 5)),
                term(q(-1, 1), 0, 5, 0, 1, field(&[(12, &[(1, 2), (0, 1)]), (4, &[(1, 1), (0, 2)])])),
            ]),
        ]
    }

    /// `Ω₅` after discarding the `O(ε^{5σ+1})` terms.
    pub fn omega5() -> LieElement {
        elem(vec![
            term(q(1, 1), 1, 1, 1, 2, ScalarField::one()),
            term(q(-1, 1), 1, 1, -1, 0, d(0, 0)),
            term(q(-1, 12), 1, 3, -1, 0, d(2, 0)),
            term(q(-1, 6), 0, 3, 0, 1, d(1, 1)),
            term(q(1, 360), 1, 5, -1, 0, field(&[(2, &[(2, 1), (0, 1)]), (-3, &[(1, 1), (1, 1)])])),
            term(q(-1, 180), 0, 5, 0, 1, field(&[(1, &[(1, 1), (0, 2)]), (3, &[(0, 1), (1, 2)])])),
            term(q(1, 90), 1, 5, 1, 2, d(2, 2)),
            term(q(-1, 90), 0, 5, 2, 3, d(1, 3)),
        ])
    }

    pub fn w0() -> LieElement {
        elem(vec![term(q(1, 1), 1, 1, 1, 2, ScalarField::one())])
    }

    pub fn w1() -> LieElement {
        elem(vec![term(q(-1, 1), 1, 1, -1, 0, d(0, 0))])
    }

    pub fn w2() -> LieElement {
        elem(vec![
            term(q(1, 12), 1, 3, -1, 0, field(&[(2, &[(0, 1), (0, 1)]), (-1, &[(2, 0)])])),
            term(q(-1, 6), 0, 3, 0, 1, d(1, 1)),
            term(q(1, 6), 1, 3, 1, 2, d(0, 2)),
        ])
    }

    /// The fifth-order part shared by `𝒲¹` and `𝒲³`; `cubic` is the
    /// `(∂Ṽ₀)²∂²Ṽ₀` coefficient in units of `−1/360`.
    pub fn fifth_order_tail(cubic: i64) -> Vec<AlgebraTerm> {
        tail(cubic, (48, -24, -18), q(-1, 120))
    }

    pub(crate) fn tail(cubic: i64, h2: (i64, i64, i64), h4: Rational) -> Vec<AlgebraTerm> {
        vec![
            term(q(-1, 24), 1, 3, 1, 0, d(0, 4)),
            term(
                q(-1, 360),
                1,
                5,
                -1,
                0,
                field(&[(cubic, &[(0, 1), (0, 1), (0, 2)]), (3, &[(1, 1), (1, 1)]), (-12, &[(2, 1), (0, 1)])]),
            ),
            term(q(1, 30), 0, 5, 0, 1, field(&[(2, &[(0, 1), (1, 2)]), (-1, &[(1, 1), (0, 2)])])),
            term(q(-1, 720), 1, 5, 1, 2, field(&[(h2.0, &[(0, 1), (0, 3)]), (h2.1, &[(0, 2), (0, 2)]), (h2.2, &[(2, 2)])])),
            term(q(1, 60), 0, 5, 2, 3, d(1, 3)),
            term(h4, 1, 5, 3, 4, d(0, 4)),
        ]
    }

    /// Central exponent `𝒲³`.
    pub fn central3() -> LieElement {
        elem(fifth_order_tail(21))
    }

    /// First sBCH stage `𝒲¹ = sBCH(−W⁰, Ω₅)`.
    pub fn stage1() -> LieElement {
        let mut terms = w1().terms();
        terms.extend(w2().terms());
        terms.extend(fifth_order_tail(16));
        elem(terms)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name, passed, detail: detail.into() }
}

fn outcome<T>(name: &'static str, r: Result<T, SymError>, f: impl FnOnce(T) -> (bool, String)) -> Check {
    match r {
        Ok(v) => {
            let (ok, detail) = f(v);
            check(name, ok, detail)
        }
        Err(e) => check(name, false, format!("error: {e}")),
    }
}

/// Band-limited sample with `Ṽ₀ = cos πx`, `Ṽ₁ = sin 2πx`, `Ṽ₂ = cos 3πx`.
fn band_limited_sample(grid: &Arc<SpatialGrid>) -> QuadratureSample {
    use std::f64::consts::PI;
    let base = [
        GridField::from_fn(grid.clone(), |x| (PI * x).cos()),
        GridField::from_fn(grid.clone(), |x| (2.0 * PI * x).sin()),
        GridField::from_fn(grid.clone(), |x| (3.0 * PI * x).cos()),
    ];
    let deriv = base.map(|f| (0..=8).map(|m| f.differentiate(m)).collect());
    QuadratureSample { t: 0.0, h: 1.0, deriv }
}

/// Every table identity against the grid commutator `AB − BA` of its two
/// operands, on band-limited data where the discretization is exact.
pub fn identity_samples() -> Check {
    let grid = SpatialGrid::new(32);
    let sample = band_limited_sample(&grid);
    let v = WaveFunction::from_fn(grid.clone(), |x| {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * x) + Complex64::new(0.5 * (std::f64::consts::PI * x).cos(), 0.0)
    });
    let mut worst = 0.0f64;
    for &(k, l) in SUPPORTED_PAIRS.iter() {
        let a = LieElement::from_term(AlgebraTerm::new(golden::q(1, 1), k + 1, 0, 0, k, golden::d(0, 0)));
        let b = LieElement::from_term(AlgebraTerm::new(golden::q(1, 1), l + 1, 0, 0, l, golden::d(1, 0)));
        let c = match commute(&a, &b) {
            Ok(c) => c,
            Err(e) => return check("commutator identities", false, format!("({k},{l}): {e}")),
        };
        let ops: Vec<JordanOperator> = [&a, &b, &c]
            .iter()
            .map(|e| JordanOperator::compile(e, &sample, 1.0, 1.0, 1.0).expect("sample holds order 8"))
            .collect();
        let ab = ops[0].apply(&ops[1].apply(&v));
        let ba = ops[1].apply(&ops[0].apply(&v));
        let cv = ops[2].apply(&v);
        let scale = ab.linf_norm().max(1.0);
        let err = ab.sub(&ba).unwrap().sub(&cv).unwrap().linf_norm() / scale;
        worst = worst.max(err);
    }
    check("commutator identities", worst <= 1e-9, format!("{} height pairs, max relative defect {worst:.1e}", SUPPORTED_PAIRS.len()))
}

pub fn commutator_series() -> Check {
    let [b1, b2, b3] = quadrature_letters();
    let computed = (|| -> Result<Vec<LieElement>, SymError> {
        let b12 = commute(&b1, &b2)?;
        let b13 = commute(&b1, &b3)?;
        let b112 = commute(&b1, &b12)?;
        Ok(vec![
            b12.clone(),
            b13.clone(),
            b112.clone(),
            commute(&b2, &b12)?,
            commute(&b1, &b13)?,
            commute(&b1, &b112)?,
            commute(&b2, &b3)?,
        ])
    })();
    outcome("commutator series", computed, |c| {
        let mut want = golden::commutator_series();
        want.push(LieElement::zero());
        let bad: Vec<usize> = (0..want.len()).filter(|&i| c[i] != want[i]).collect();
        (bad.is_empty(), if bad.is_empty() { "7 commutators exact, [B₂,B₃] = 0".into() } else { format!("mismatch at {bad:?}") })
    })
}

pub fn omega5_golden(rules: &Rules) -> Check {
    let start = std::time::Instant::now();
    let omega = rules.magnus();
    let secs = start.elapsed().as_secs_f64();
    outcome("Ω₅ closed form", omega, |o| (o == golden::omega5(), format!("8 terms, derived in {secs:.3}s")))
}

pub fn splitting_golden(rules: &Rules) -> Check {
    let trace = rules.magnus().and_then(|o| rules.zassenhaus_trace(&o, 2));
    outcome("Zassenhaus splitting", trace, |t| {
        let s = &t.scheme;
        let ok = s.outer == [golden::w0(), golden::w1(), golden::w2()]
            && s.central == golden::central3()
            && t.stages.first() == Some(&golden::stage1());
        (ok, if ok { "W⁰, W¹, W², 𝒲³ and 𝒲¹ exact".into() } else { "differs from the closed form".into() })
    })
}

pub fn sbch_oracle(table: &SbchTable) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let (res, slope) = sbch_residual_order(&mut rng, table, 8, &[0.2, 0.1, 0.05], 4);
    check("sBCH dense oracle", slope >= 5.5, format!("residuals {:.1e} {:.1e} {:.1e}, order {slope:.2}", res[0], res[1], res[2]))
}

pub fn skew_hermitian_assembly() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = SpatialGrid::new(16);
    let mut worst = 0.0f64;
    for k in 0..=4u32 {
        let f = GridField::new(grid.clone(), (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let phase = Complex64::new(0.0, 1.0).powu(k + 1);
        let a = assemble(&grid, |v| {
            let mut w = apply_jordan(k, &f, v).unwrap();
            w.values_mut().iter_mut().for_each(|c| *c *= phase);
            w
        });
        let scale = a.iter().fold(1.0f64, |m, c| m.max(c.norm()));
        worst = worst.max(skew_hermitian_defect(&a) / scale);
    }
    check("skew-Hermitian assembly", worst <= 1e-12, format!("M=33, k=0..4, max relative defect {worst:.1e}"))
}

pub fn missing_identity_diagnostic() -> Check {
    let a = golden::elem(vec![golden::term(golden::q(1, 1), 0, 0, 0, 3, golden::d(0, 0))]);
    let b = golden::elem(vec![golden::term(golden::q(1, 1), 0, 0, 0, 3, golden::d(1, 0))]);
    match commute(&a, &b) {
        Err(e @ SymError::TableIncomplete { .. }) => {
            let msg = e.to_string();
            check("out-of-table diagnostic", msg.contains("identity table incomplete"), msg)
        }
        other => check("out-of-table diagnostic", false, format!("unexpected {other:?}")),
    }
}

/// All checks with the given rules (the sBCH table is the mutation hook).
pub fn run_checks(rules: &Rules) -> Vec<Check> {
    vec![
        identity_samples(),
        commutator_series(),
        omega5_golden(rules),
        splitting_golden(rules),
        sbch_oracle(&rules.sbch_table),
        skew_hermitian_assembly(),
        missing_identity_diagnostic(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_build_passes_every_check() {
        for c in run_checks(&Rules::default()) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn mutated_table_fails_the_splitting_check() {
        let mut rules = Rules::default();
        let c = rules.sbch_table.get("XXXXY").unwrap().clone();
        rules.sbch_table.set("XXXXY", c + golden::q(1, 1000));
        let checks = run_checks(&rules);
        let split = checks.iter().find(|c| c.name == "Zassenhaus splitting").unwrap();
        assert!(!split.passed);
        assert!(checks.iter().find(|c| c.name == "Ω₅ closed form").unwrap().passed);
    }
}
