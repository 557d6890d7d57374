//! Quadrature Magnus expansion of `A(t) = iε∂ₓ² − iε⁻¹V(t)` in the Jordan
//! basis, using three Gauss–Legendre nodes per step.

use num_traits::One;

use super::algebra::{AlgebraTerm, LieElement};
use super::field::ScalarField;
use super::{Rational, Rules, SymError};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `ihε⟨2|1⟩`, the kinetic part of one step.
pub fn kinetic() -> LieElement {
    LieElement::from_term(AlgebraTerm::new(Rational::one(), 1, 1, 1, 2, ScalarField::one()))
}

/// The letters `B₁ = ihε⟨2|1⟩ − ihε⁻¹⟨0|Ṽ₀⟩`, `B₂ = −ih²ε⁻¹⟨0|Ṽ₁⟩`,
/// `B₃ = −ih³ε⁻¹⟨0|Ṽ₂⟩`.
pub fn quadrature_letters() -> [LieElement; 3] {
    let potential = |slot: u8, h: u32| {
        LieElement::from_term(AlgebraTerm::new(
            -Rational::one(),
            1,
            h,
            -1,
            0,
            ScalarField::derivative(slot, 0),
        ))
    };
    let b1 = kinetic().add(&potential(0, 1));
    [b1, potential(1, 2), potential(2, 3)]
}

pub(crate) fn omega5_with(rules: &Rules) -> Result<LieElement, SymError> {
    let [b1, b2, b3] = quadrature_letters();
    let c = |a: &LieElement, b: &LieElement| rules.commute(a, b);
    let b12 = c(&b1, &b2)?;
    let b13 = c(&b1, &b3)?;
    let b23 = c(&b2, &b3)?;
    let b1_13 = c(&b1, &b13)?;
    let b2_12 = c(&b2, &b12)?;
    let b1_12 = c(&b1, &b12)?;
    let b1_1_12 = c(&b1, &b1_12)?;

    let theta = b1
        .add(&b3.scale(&q(1, 12)))
        .add(&b12.scale(&q(-1, 12)))
        .add(&b23.scale(&q(1, 240)))
        .add(&b1_13.scale(&q(1, 360)))
        .add(&b2_12.scale(&q(-1, 240)))
        .add(&b1_1_12.scale(&q(1, 720)));
    Ok(theta.truncate_at(5))
}

pub(crate) fn omega3_with(rules: &Rules) -> Result<LieElement, SymError> {
    let [b1, b2, b3] = quadrature_letters();
    let b12 = rules.commute(&b1, &b2)?;
    let theta = b1.add(&b3.scale(&q(1, 12))).add(&b12.scale(&q(-1, 12)));
    Ok(theta.truncate_at(3))
}

/// Sixth-order Magnus exponent `Ω₅`, with terms below `O(ε^{7σ−1})` dropped.
pub fn magnus_omega5() -> Result<LieElement, SymError> {
    omega5_with(&Rules::default())
}

/// Fourth-order analogue `Ω₃` (grade-3 truncation of the same quadrature).
pub fn magnus_omega3() -> Result<LieElement, SymError> {
    omega3_with(&Rules::for_grade(3)?)
}
