//! Independent check of the symbolic engine: operators are kept in normal
//! form `Σ cₖ(x)∂ᵏ` and composed with the Leibniz rule, with no use of the
//! commutator identity table.

mod common;

use std::collections::BTreeMap;

use common::*;
use mzs_core::symlie::{
    magnus_omega5, quadrature_letters, sbch_with, table, AlgebraTerm, BracketAlgebra,
    DerivativeAtom, LieElement, Monomial, Rational, Rules, SbchTable, ScalarField,
};
use num_traits::{One, Zero};
use proptest::prelude::*;

const CAP: u8 = 40;

type Op = BTreeMap<u32, ScalarField>;

fn binom(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn op_add(a: &Op, b: &Op, c: &Rational) -> Op {
    let mut out = a.clone();
    for (k, f) in b {
        let e = out.entry(*k).or_insert_with(ScalarField::zero);
        *e = &*e + &f.scale(c);
    }
    out.retain(|_, f| !f.is_zero());
    out
}

fn compose(a: &Op, b: &Op) -> Op {
    let mut out = Op::new();
    for (&k, f) in a {
        for (&l, g) in b {
            for j in 0..=k {
                let dg = g.differentiate_capped(j, CAP).unwrap();
                let t = f.multiply(&dg).scale(&q(binom(k, j), 1));
                let e = out.entry(k - j + l).or_insert_with(ScalarField::zero);
                *e = &*e + &t;
            }
        }
    }
    out.retain(|_, f| !f.is_zero());
    out
}

/// `½(f∂ᵏ + ∂ᵏ∘f)`
fn jordan(k: u32, f: &ScalarField) -> Op {
    let left = Op::from([(k, f.clone())]);
    let right = compose(&Op::from([(k, ScalarField::one())]), &Op::from([(0, f.clone())]));
    op_add(&left, &right, &Rational::one()).into_iter().map(|(k, f)| (k, f.scale(&q(1, 2)))).collect()
}

/// Peels the leading order off repeatedly; the decomposition is unique.
fn to_jordan(op: &Op) -> Vec<(u32, ScalarField)> {
    let mut rest = op.clone();
    let mut out = Vec::new();
    while let Some((&k, f)) = rest.iter().next_back() {
        let f = f.clone();
        rest = op_add(&rest, &jordan(k, &f), &-Rational::one());
        out.push((k, f));
    }
    out
}

/// Operators graded by `(hExp, epsExp, iExp mod 4)`.
#[derive(Clone, Debug, Default)]
struct Graded(BTreeMap<(u32, i32, u8), Op>);

impl Graded {
    fn from_lie(e: &LieElement) -> Self {
        let mut g = Graded::default();
        for t in e.terms() {
            let op = jordan(t.height, &t.field.scale(&t.coeff));
            let slot = g.0.entry((t.h_exp, t.eps_exp, t.i_exp)).or_default();
            *slot = op_add(slot, &op, &Rational::one());
        }
        g
    }

    fn to_lie(&self) -> LieElement {
        let mut out = LieElement::zero();
        for (&(h, e, i), op) in &self.0 {
            for (k, f) in to_jordan(op) {
                out.push(AlgebraTerm::new(Rational::one(), i as u32, h, e, k, f));
            }
        }
        out
    }
}

impl BracketAlgebra for Graded {
    type Error = std::convert::Infallible;
    /// Highest power of `h` kept.
    type Context = u32;

    fn zero_like(&self) -> Self {
        Graded::default()
    }

    fn add_scaled(&self, other: &Self, c: &Rational) -> Self {
        let mut out = self.clone();
        for (key, op) in &other.0 {
            let slot = out.0.entry(*key).or_default();
            *slot = op_add(slot, op, c);
        }
        out.0.retain(|_, op| !op.is_empty());
        out
    }

    fn bracket(&self, other: &Self, _: &[&Self], max_h: &u32) -> Result<Self, Self::Error> {
        let mut out = Graded::default();
        for (&(h1, e1, i1), a) in &self.0 {
            for (&(h2, e2, i2), b) in &other.0 {
                if h1 + h2 > *max_h {
                    continue;
                }
                let ab = op_add(&compose(a, b), &compose(b, a), &-Rational::one());
                let slot = out.0.entry((h1 + h2, e1 + e2, (i1 + i2) % 4)).or_default();
                *slot = op_add(slot, &ab, &Rational::one());
            }
        }
        out.0.retain(|_, op| !op.is_empty());
        Ok(out)
    }
}

fn oracle_commute(a: &LieElement, b: &LieElement) -> LieElement {
    Graded::from_lie(a).bracket(&Graded::from_lie(b), &[], &u32::MAX).unwrap().to_lie()
}

#[test]
fn magnus_omega5_agrees() {
    let [b1, b2, b3] = quadrature_letters();
    let c = oracle_commute;
    let b12 = c(&b1, &b2);
    let theta = b1
        .add(&b3.scale(&q(1, 12)))
        .add(&b12.scale(&q(-1, 12)))
        .add(&c(&b2, &b3).scale(&q(1, 240)))
        .add(&c(&b1, &c(&b1, &b3)).scale(&q(1, 360)))
        .add(&c(&b2, &b12).scale(&q(-1, 240)))
        .add(&c(&b1, &c(&b1, &b12)).scale(&q(1, 720)));
    assert_eq!(theta.truncate_at(5), magnus_omega5().unwrap());
}

#[test]
fn zassenhaus_stages_agree() {
    let omega = magnus_omega5().unwrap();
    let table = SbchTable::standard();
    let w0 = Graded::from_lie(&expected_w0().neg());
    let stage1 = sbch_with(&table, &w0, &Graded::from_lie(&omega), &5).unwrap().to_lie().truncate_at(5);
    assert_eq!(stage1, expected_stage1());

    let w1 = Graded::from_lie(&expected_w1().neg());
    let stage2 = sbch_with(&table, &w1, &Graded::from_lie(&stage1), &5).unwrap().to_lie().truncate_at(5);
    let w2 = Graded::from_lie(&expected_w2().neg());
    let central = sbch_with(&table, &w2, &Graded::from_lie(&stage2), &5).unwrap().to_lie().truncate_at(5);
    assert_eq!(central, expected_central3());

    let engine = Rules::default().zassenhaus_trace(&omega, 2).unwrap();
    assert_eq!(engine.stages[1], stage2);
}

#[test]
fn static_linear_part_has_closed_form() {
    // For Y linear, log(e^{-X/2}e^{X+Y}e^{-X/2}) = Y + ad²Y/24 + ad⁴Y/1920 + O(Y²);
    // with X = ihε⟨2|1⟩ and Y = −ihε⁻¹⟨0|V⟩ the ad⁴ part carries ⟨4|16∂⁴V⟩.
    let omega = magnus_omega5().unwrap();
    let w1 = Rules::default().sbch(&expected_w0().neg(), &omega).unwrap();
    let key = mzs_core::symlie::TermKey { h_exp: 5, height: 4, eps_exp: 3, i_exp: 1 };
    assert_eq!(w1.field_at(&key).unwrap(), &d(0, 4).scale(&q(-16, 1920)));
}

fn arb_field() -> impl Strategy<Value = ScalarField> {
    let atom = (0u8..3, 0u8..3).prop_map(|(s, o)| DerivativeAtom::new(s, o).unwrap());
    let mono = (-3i64..=3, prop::collection::vec(atom, 0..3))
        .prop_map(|(c, atoms)| Monomial::new(q(c, 1), atoms));
    prop::collection::vec(mono, 1..3).prop_map(ScalarField::from_monomials)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identity_table_matches_leibniz(f in arb_field(), g in arb_field(), pair in 0usize..9) {
        let (k, l) = table::SUPPORTED_PAIRS[pair];
        let from_table = table::jordan_commutator(k, &f, l, &g, CAP).unwrap();
        let a = jordan(k, &f);
        let b = jordan(l, &g);
        let op = op_add(&compose(&a, &b), &compose(&b, &a), &-Rational::one());
        let mut got: BTreeMap<u32, ScalarField> = BTreeMap::new();
        for (m, h) in from_table {
            if !h.is_zero() {
                let e = got.entry(m).or_insert_with(ScalarField::zero);
                *e = &*e + &h;
            }
        }
        got.retain(|_, h| !h.is_zero());
        let want: BTreeMap<u32, ScalarField> = to_jordan(&op).into_iter().collect();
        prop_assert_eq!(got, want);
        if !(k == 0 && l == 0) {
            let top = (k + l).saturating_sub(1);
            prop_assert!(to_jordan(&op).iter().all(|(m, _)| *m <= top));
        }
    }
}

#[test]
fn zero_scalar_is_zero_operator() {
    assert!(jordan(3, &ScalarField::zero()).is_empty());
    assert!(Rational::zero().is_zero());
}
