//! Exact symbolic engine for the Lie algebra of Jordan-product terms
//! `iᵏ⁺¹⟨k|f⟩`: commutators, the quadrature Magnus expansion, symmetric BCH
//! and the Zassenhaus splitting built on top of them.
//!
//! All arithmetic is over arbitrary-precision rationals.

pub mod algebra;
pub mod bch;
pub mod export;
pub mod field;
pub mod magnus;
pub mod table;
pub mod zassenhaus;

use thiserror::Error;

pub use algebra::{is_negligible, size_exponent, AlgebraTerm, LieElement, TermKey};
pub use bch::{sbch_with, BracketAlgebra, SbchTable};
pub use field::{DerivativeAtom, Monomial, ScalarField, DEFAULT_DERIVATIVE_CAP};
pub use magnus::{magnus_omega3, magnus_omega5, quadrature_letters};
pub use zassenhaus::{SplittingScheme, ZassenhausTrace};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("identity table incomplete: no rule for commutator of heights ({k},{l})")]
    TableIncomplete { k: u32, l: u32 },
    #[error("derivative cap exceeded: ∂^{order} of V{slot} (cap {cap})")]
    DerivativeCap { slot: u8, order: u8, cap: u8 },
    #[error("potential slot {0} out of range (expected 0, 1 or 2)")]
    BadSlot(u8),
    #[error("height of the zero element is undefined")]
    UndefinedHeight,
    #[error("sigma must lie in (0, 1], got {0}")]
    SigmaDomain(String),
    #[error("unsupported Magnus grade {0} (expected 3 or 5)")]
    UnsupportedGrade(u32),
    #[error("malformed scheme document: {0}")]
    Import(String),
}

/// Knobs shared by every symbolic operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rules {
    pub derivative_cap: u8,
    /// Magnus grade whose accuracy decides which terms are negligible.
    pub grade: u32,
    pub sbch_table: SbchTable,
}

impl Default for Rules {
    fn default() -> Self {
        Self { derivative_cap: DEFAULT_DERIVATIVE_CAP, grade: 5, sbch_table: SbchTable::standard() }
    }
}

impl Rules {
    pub fn for_grade(grade: u32) -> Result<Self, SymError> {
        match grade {
            3 | 5 => Ok(Self { grade, ..Self::default() }),
            g => Err(SymError::UnsupportedGrade(g)),
        }
    }

    pub fn commute(&self, a: &LieElement, b: &LieElement) -> Result<LieElement, SymError> {
        a.commute_filtered(b, self.derivative_cap, |_, _| false)
    }

    pub fn truncate(&self, a: &LieElement) -> LieElement {
        a.truncate_at(self.grade)
    }

    /// Symmetric BCH of `x` and `y`, truncated at the configured grade.
    pub fn sbch(&self, x: &LieElement, y: &LieElement) -> Result<LieElement, SymError> {
        Ok(sbch_with(&self.sbch_table, x, y, self)?.truncate_at(self.grade))
    }

    /// The truncated Magnus exponent of the configured grade.
    pub fn magnus(&self) -> Result<LieElement, SymError> {
        match self.grade {
            5 => magnus::omega5_with(self),
            3 => magnus::omega3_with(self),
            g => Err(SymError::UnsupportedGrade(g)),
        }
    }

    pub fn zassenhaus_split(
        &self,
        omega: &LieElement,
        stages: usize,
    ) -> Result<SplittingScheme, SymError> {
        Ok(self.zassenhaus_trace(omega, stages)?.scheme)
    }

    pub fn zassenhaus_trace(
        &self,
        omega: &LieElement,
        stages: usize,
    ) -> Result<ZassenhausTrace, SymError> {
        zassenhaus::trace(self, omega, stages)
    }
}

impl BracketAlgebra for LieElement {
    type Error = SymError;
    type Context = Rules;

    fn zero_like(&self) -> Self {
        LieElement::zero()
    }

    fn add_scaled(&self, other: &Self, c: &Rational) -> Self {
        self.add(&other.scale(c))
    }

    fn bracket(&self, other: &Self, pending: &[&Self], rules: &Rules) -> Result<Self, SymError> {
        // Lower bounds on what the pending brackets add to hExp and to
        // epsExp − height (each bracket lowers height by at least one).
        let mut extra_h = 0i64;
        let mut extra_d = 0i64;
        for p in pending {
            match p.lower_bounds() {
                Some((h, d)) => {
                    extra_h += h;
                    extra_d += d + 1;
                }
                None => return Ok(LieElement::zero()),
            }
        }
        let grade = rules.grade;
        self.commute_filtered(other, rules.derivative_cap, |ka, kb| {
            let h = (ka.h_exp + kb.h_exp) as i64 + extra_h;
            let d = ka.eps_margin() + kb.eps_margin() + 1 + extra_d;
            is_negligible(h, d, grade)
        })
    }
}

/// `[a, b]` with default rules.
pub fn commute(a: &LieElement, b: &LieElement) -> Result<LieElement, SymError> {
    Rules::default().commute(a, b)
}

/// Symmetric BCH with default rules (grade 5 truncation).
pub fn sbch(x: &LieElement, y: &LieElement) -> Result<LieElement, SymError> {
    Rules::default().sbch(x, y)
}

/// Zassenhaus splitting with default rules.
pub fn zassenhaus_split(omega: &LieElement, stages: usize) -> Result<SplittingScheme, SymError> {
    Rules::default().zassenhaus_split(omega, stages)
}
