//! Symmetric Zassenhaus splitting: repeatedly peel the largest exponent off
//! the central one with the symmetric BCH formula.

use super::algebra::LieElement;
use super::magnus::kinetic;
use super::{Rules, SymError};

/// `e^{½W⁰}⋯e^{½Wˢ} e^{𝒲} e^{½Wˢ}⋯e^{½W⁰}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingScheme {
    /// `W⁰ … Wˢ`, each applied with weight ½ on both sides.
    pub outer: Vec<LieElement>,
    /// Central exponent, applied once with weight 1.
    pub central: LieElement,
}

impl SplittingScheme {
    /// Exponents and weights in application order (palindromic).
    pub fn factors(&self) -> Vec<(&LieElement, f64)> {
        let mut out: Vec<(&LieElement, f64)> = self.outer.iter().map(|w| (w, 0.5)).collect();
        out.push((&self.central, 1.0));
        out.extend(self.outer.iter().rev().map(|w| (w, 0.5)));
        out
    }

    pub fn has_skew_parity(&self) -> bool {
        self.outer.iter().all(LieElement::has_skew_parity) && self.central.has_skew_parity()
    }
}

/// A splitting together with every intermediate central exponent
/// `𝒲¹, …, 𝒲ˢ⁺¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZassenhausTrace {
    pub scheme: SplittingScheme,
    pub stages: Vec<LieElement>,
}

pub(crate) fn trace(
    rules: &Rules,
    omega: &LieElement,
    stages: usize,
) -> Result<ZassenhausTrace, SymError> {
    let w0 = kinetic();
    let mut outer = vec![w0.clone()];
    let mut history = Vec::new();
    let mut current = omega.clone();
    let mut last = w0;
    for k in 0..stages {
        current = rules.sbch(&last.neg(), &current)?;
        history.push(current.clone());
        let h_exp = 2 * k as u32 + 1;
        let next = current.filter(|key| key.h_exp == h_exp && key.eps_margin() == -1);
        if next.is_zero() {
            return Ok(ZassenhausTrace {
                scheme: SplittingScheme { outer, central: current },
                stages: history,
            });
        }
        outer.push(next.clone());
        last = next;
    }
    let central = rules.sbch(&last.neg(), &current)?;
    history.push(central.clone());
    Ok(ZassenhausTrace { scheme: SplittingScheme { outer, central }, stages: history })
}
