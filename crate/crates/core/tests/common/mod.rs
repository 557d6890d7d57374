#![allow(dead_code)]

use mzs_core::symlie::{AlgebraTerm, DerivativeAtom, LieElement, Monomial, Rational, ScalarField};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Field from `(coeff, [(slot, order), ...])` monomials.
pub fn field(monos: &[(i64, &[(u8, u8)])]) -> ScalarField {
    ScalarField::from_monomials(monos.iter().map(|(c, atoms)| {
        Monomial::new(
            q(*c, 1),
            atoms.iter().map(|&(s, o)| DerivativeAtom::new(s, o).unwrap()).collect(),
        )
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

/// Ω₅ as printed after discarding the `O(ε^{5σ+1})` terms.
pub fn expected_omega5() -> LieElement {
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

pub fn expected_w0() -> LieElement {
    elem(vec![term(q(1, 1), 1, 1, 1, 2, ScalarField::one())])
}

pub fn expected_w1() -> LieElement {
    elem(vec![term(q(-1, 1), 1, 1, -1, 0, d(0, 0))])
}

pub fn expected_w2() -> LieElement {
    elem(vec![
        term(q(1, 12), 1, 3, -1, 0, field(&[(2, &[(0, 1), (0, 1)]), (-1, &[(2, 0)])])),
        term(q(-1, 6), 0, 3, 0, 1, d(1, 1)),
        term(q(1, 6), 1, 3, 1, 2, d(0, 2)),
    ])
}

/// The fifth-order tail shared by 𝒲¹ and 𝒲³; only the `(∂Ṽ₀)²(∂²Ṽ₀)`
/// coefficient differs between them.
///
/// The coefficients that involve `Ṽ₀` alone are the ones produced by the
/// exact sBCH and confirmed by the operator-calculus oracle in
/// `operator_oracle.rs`. The printed display of the method has different
/// numbers there (see [`printed_tail`]).
pub fn fifth_order_tail(cubic: i64) -> Vec<AlgebraTerm> {
    tail(cubic, (48, -24, -18), q(-1, 120))
}

/// The tail exactly as printed alongside the method, `cubic` being 8 for
/// 𝒲¹ and 13 for 𝒲³.
pub fn printed_tail(cubic: i64) -> Vec<AlgebraTerm> {
    tail(cubic, (127, 130, -18), q(-13, 90))
}

fn tail(cubic: i64, h2: (i64, i64, i64), h4: Rational) -> Vec<AlgebraTerm> {
    vec![
        term(q(-1, 24), 1, 3, 1, 0, d(0, 4)),
        term(
            q(-1, 360),
            1,
            5,
            -1,
            0,
            field(&[
                (cubic, &[(0, 1), (0, 1), (0, 2)]),
                (3, &[(1, 1), (1, 1)]),
                (-12, &[(2, 1), (0, 1)]),
            ]),
        ),
        term(q(1, 30), 0, 5, 0, 1, field(&[(2, &[(0, 1), (1, 2)]), (-1, &[(1, 1), (0, 2)])])),
        term(
            q(-1, 720),
            1,
            5,
            1,
            2,
            field(&[(h2.0, &[(0, 1), (0, 3)]), (h2.1, &[(0, 2), (0, 2)]), (h2.2, &[(2, 2)])]),
        ),
        term(q(1, 60), 0, 5, 2, 3, d(1, 3)),
        term(h4, 1, 5, 3, 4, d(0, 4)),
    ]
}

pub fn expected_central3() -> LieElement {
    elem(fifth_order_tail(21))
}

pub fn expected_stage1() -> LieElement {
    let mut terms = expected_w1().terms();
    terms.extend(expected_w2().terms());
    terms.extend(fifth_order_tail(16));
    elem(terms)
}

pub fn printed_central3() -> LieElement {
    elem(printed_tail(13))
}

pub fn printed_stage1() -> LieElement {
    let mut terms = expected_w1().terms();
    terms.extend(expected_w2().terms());
    terms.extend(printed_tail(8));
    elem(terms)
}

/// Drops the `h⁵` monomials built from `Ṽ₀` alone.
pub fn without_h5_static(e: &LieElement) -> LieElement {
    let mut out = LieElement::zero();
    for t in e.terms() {
        if t.h_exp != 5 {
            out.push(t);
            continue;
        }
        let kept = ScalarField::from_monomials(
            t.field
                .monomials()
                .filter(|(atoms, _)| atoms.iter().any(|a| a.slot() != 0))
                .map(|(atoms, c)| Monomial::new(c.clone(), atoms.to_vec())),
        );
        out.push(AlgebraTerm::new(t.coeff, t.i_exp as u32, t.h_exp, t.eps_exp, t.height, kept));
    }
    out
}
