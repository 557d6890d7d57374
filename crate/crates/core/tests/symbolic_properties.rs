mod common;

use common::*;
use mzs_core::symlie::{
    commute, export, magnus_omega5, sbch, zassenhaus_split, AlgebraTerm, DerivativeAtom,
    LieElement, Monomial, Rules, ScalarField, SymError,
};
use proptest::prelude::*;

fn arb_field() -> impl Strategy<Value = ScalarField> {
    let atom = (0u8..3, 0u8..2).prop_map(|(s, o)| DerivativeAtom::new(s, o).unwrap());
    let mono = (-4i64..=4, 1i64..=3, prop::collection::vec(atom, 0..3))
        .prop_map(|(n, d, atoms)| Monomial::new(q(n, d), atoms));
    prop::collection::vec(mono, 1..3)
        .prop_map(ScalarField::from_monomials)
        .prop_filter("nonzero", |f| !f.is_zero())
}

/// A skew-parity term of the given height.
fn arb_term(height: u32) -> impl Strategy<Value = AlgebraTerm> {
    (arb_field(), 0u32..2, 0u32..4, -1i32..3).prop_map(move |(f, flip, h, e)| {
        AlgebraTerm::new(q(1, 1), (height + 1) % 2 + 2 * flip, h, e, height, f)
    })
}

fn arb_element(height: u32) -> impl Strategy<Value = LieElement> {
    prop::collection::vec(arb_term(height), 1..3).prop_map(LieElement::from_terms)
}

/// Height pairs with a closed-form commutator.
fn arb_pair() -> impl Strategy<Value = (LieElement, LieElement)> {
    prop::sample::select(vec![(4, 0), (3, 2), (3, 0), (2, 2), (2, 1), (2, 0), (1, 1), (1, 0), (0, 0)])
        .prop_flat_map(|(k, l)| (arb_element(k), arb_element(l)))
}

fn arb_triple() -> impl Strategy<Value = (LieElement, LieElement, LieElement)> {
    prop::sample::select(vec![(2, 2, 0), (2, 1, 0), (1, 1, 1), (1, 1, 0), (2, 0, 0)])
        .prop_flat_map(|(a, b, c)| (arb_element(a), arb_element(b), arb_element(c)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn height_reduction((a, b) in arb_pair()) {
        let c = commute(&a, &b).unwrap();
        if !c.is_zero() {
            let bound = a.height().unwrap() + b.height().unwrap();
            prop_assert!(c.height().unwrap() < bound.max(1));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn antisymmetry((a, b) in arb_pair()) {
        prop_assert_eq!(commute(&a, &b).unwrap(), commute(&b, &a).unwrap().neg());
        if a.height().unwrap() <= 2 {
            prop_assert!(commute(&a, &a).unwrap().is_zero());
        }
    }

    #[test]
    fn bilinearity((a, b) in arb_pair(), c in arb_element(0), n in -5i64..5, d in 1i64..5) {
        let r = q(n, d);
        let sum = commute(&a.add(&c), &b).unwrap();
        prop_assert_eq!(sum, commute(&a, &b).unwrap().add(&commute(&c, &b).unwrap()));
        prop_assert_eq!(commute(&a.scale(&r), &b).unwrap(), commute(&a, &b).unwrap().scale(&r));
        prop_assert_eq!(
            commute(&a.shift(1, 2, -1), &b).unwrap(),
            commute(&a, &b).unwrap().shift(1, 2, -1)
        );
    }

    #[test]
    fn jacobi((a, b, c) in arb_triple()) {
        let t1 = commute(&a, &commute(&b, &c).unwrap()).unwrap();
        let t2 = commute(&b, &commute(&c, &a).unwrap()).unwrap();
        let t3 = commute(&c, &commute(&a, &b).unwrap()).unwrap();
        prop_assert!(t1.add(&t2).add(&t3).is_zero());
    }

    #[test]
    fn skew_parity_closure((a, b) in arb_pair()) {
        prop_assert!(a.has_skew_parity() && b.has_skew_parity());
        prop_assert!(commute(&a, &b).unwrap().has_skew_parity());
    }

    #[test]
    fn sbch_keeps_skew_parity(kin in 1i64..4, y in arb_element(0)) {
        let y = y.shift(0, 1, -1);
        let x = elem(vec![term(q(kin, 1), 1, 1, 1, 2, ScalarField::one())]);
        let rules = Rules { derivative_cap: 16, ..Rules::default() };
        prop_assert!(rules.sbch(&x, &y).unwrap().has_skew_parity());
        // the default cap of 8 is reported, never silently exceeded
        if let Err(e) = sbch(&x, &y) {
            prop_assert!(matches!(e, SymError::DerivativeCap { cap: 8, .. }), "{:?}", e);
        }
    }

    #[test]
    fn canonical_form_ignores_term_order(terms in prop::collection::vec(arb_term(1), 1..5)) {
        let forward = LieElement::from_terms(terms.clone());
        let backward = LieElement::from_terms(terms.into_iter().rev());
        prop_assert_eq!(forward.to_string(), backward.to_string());
        prop_assert_eq!(forward, backward);
    }
}

#[test]
fn derivation_is_deterministic() {
    let a = zassenhaus_split(&magnus_omega5().unwrap(), 2).unwrap();
    let b = zassenhaus_split(&magnus_omega5().unwrap(), 2).unwrap();
    assert_eq!(export::to_json(&a), export::to_json(&b));
    assert_eq!(export::pretty(&a), export::pretty(&b));
}

#[test]
fn json_round_trip() {
    let scheme = zassenhaus_split(&magnus_omega5().unwrap(), 2).unwrap();
    let text = export::to_json(&scheme);
    assert_eq!(export::from_json(&text).unwrap(), scheme);
    assert!(matches!(export::from_json("{\"exponents\":[],\"extra\":1}"), Err(SymError::Import(_))));
}

#[test]
fn pretty_shows_w2_coefficients() {
    let scheme = zassenhaus_split(&magnus_omega5().unwrap(), 2).unwrap();
    let text = export::pretty(&scheme);
    let w2 = text.lines().find(|l| l.starts_with("W[2]")).unwrap();
    for c in ["1/12", "1/6"] {
        assert!(w2.contains(c), "{w2}");
    }
    assert!(text.contains("step = exp(½W[0]) exp(½W[1]) exp(½W[2]) exp(𝒲[3]) exp(½W[2])"));
    let tex = export::latex(&scheme);
    assert!(tex.contains("\\frac{1}{12}"));
}

#[test]
fn height_of_examples() {
    let a = elem(vec![
        term(q(1, 1), 1, 0, 0, 2, ScalarField::one()),
        term(q(-1, 1), 1, 0, 0, 0, d(0, 0)),
    ]);
    assert_eq!(a.height().unwrap(), 2);
    assert!(matches!(LieElement::zero().height(), Err(SymError::UndefinedHeight)));
}
