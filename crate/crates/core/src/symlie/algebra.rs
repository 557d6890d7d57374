//! Elements of the Lie algebra spanned by `iᵏ⁺¹⟨k|f⟩`, carried with explicit
//! powers of `i`, the time step `h` and the semiclassical parameter `ε`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::field::{superscript, ScalarField};
use super::table::jordan_commutator;
use super::{Rational, SymError};

/// Bookkeeping key of a term. `i_exp` is kept in `{0, 1}`; a factor `i²` is
/// folded into the coefficient sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub h_exp: u32,
    pub height: u32,
    pub eps_exp: i32,
    pub i_exp: u8,
}

impl TermKey {
    /// `epsExp − height`; nonnegative shifts make a term asymptotically smaller.
    pub fn eps_margin(&self) -> i64 {
        self.eps_exp as i64 - self.height as i64
    }
}

/// `coeff · i^iExp · h^hExp · ε^epsExp · ⟨height|field⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraTerm {
    pub coeff: Rational,
    pub i_exp: u8,
    pub h_exp: u32,
    pub eps_exp: i32,
    pub height: u32,
    pub field: ScalarField,
}

impl AlgebraTerm {
    pub fn new(
        coeff: Rational,
        i_exp: u32,
        h_exp: u32,
        eps_exp: i32,
        height: u32,
        field: ScalarField,
    ) -> Self {
        Self { coeff, i_exp: (i_exp % 4) as u8, h_exp, eps_exp, height, field }
    }

    pub fn key(&self) -> TermKey {
        TermKey { h_exp: self.h_exp, height: self.height, eps_exp: self.eps_exp, i_exp: self.i_exp }
    }

    /// `iExp ≡ height + 1 (mod 2)`: the term is skew-Hermitian for real fields.
    pub fn has_skew_parity(&self) -> bool {
        (self.i_exp as u32) % 2 == (self.height + 1) % 2
    }
}

/// Asymptotic `ε`-exponent of a term's size when `h = O(ε^σ)`:
/// `σ·hExp + epsExp − height`.
pub fn size_exponent(term: &AlgebraTerm, sigma: &Rational) -> Result<Rational, SymError> {
    if !sigma.is_positive() || *sigma > Rational::one() {
        return Err(SymError::SigmaDomain(sigma.to_string()));
    }
    Ok(sigma * Rational::from_integer(term.h_exp.into())
        + Rational::from_integer((term.eps_exp as i64 - term.height as i64).into()))
}

/// True when a term of this shape is `O(ε^{(grade+2)σ−1})` for every
/// `σ ∈ (0, 1]`, i.e. below the accuracy of a grade-`grade` Magnus truncation.
pub fn is_negligible(h_exp: i64, eps_margin: i64, grade: u32) -> bool {
    // linear in σ, so checking σ → 0⁺ and σ = 1 suffices
    let slope = h_exp - (grade as i64 + 2);
    let offset = eps_margin + 1;
    offset >= 0 && slope + offset >= 0
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LieElement {
    terms: BTreeMap<TermKey, ScalarField>,
}

impl LieElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_term(term: AlgebraTerm) -> Self {
        let mut out = Self::zero();
        out.push(term);
        out
    }

    pub fn from_terms<I: IntoIterator<Item = AlgebraTerm>>(terms: I) -> Self {
        let mut out = Self::zero();
        for t in terms {
            out.push(t);
        }
        out
    }

    /// Adds one term, normalizing `i^iExp` to `iExp ∈ {0, 1}`.
    pub fn push(&mut self, term: AlgebraTerm) {
        let mut coeff = term.coeff;
        let mut i_exp = term.i_exp % 4;
        if i_exp >= 2 {
            i_exp -= 2;
            coeff = -coeff;
        }
        if coeff.is_zero() || term.field.is_zero() {
            return;
        }
        let key = TermKey { h_exp: term.h_exp, height: term.height, eps_exp: term.eps_exp, i_exp };
        self.add_field(key, term.field.scale(&coeff));
    }

    fn add_field(&mut self, key: TermKey, field: ScalarField) {
        if field.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(field);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &field;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Raw canonical entries; the coefficient lives inside the field.
    pub fn entries(&self) -> impl Iterator<Item = (&TermKey, &ScalarField)> {
        self.terms.iter()
    }

    /// Field attached to a key, if present.
    pub fn field_at(&self, key: &TermKey) -> Option<&ScalarField> {
        self.terms.get(key)
    }

    /// Canonical terms with the rational content factored out of each field.
    pub fn terms(&self) -> Vec<AlgebraTerm> {
        self.terms
            .iter()
            .map(|(k, f)| {
                let (coeff, field) = f.content();
                AlgebraTerm {
                    coeff,
                    i_exp: k.i_exp,
                    h_exp: k.h_exp,
                    eps_exp: k.eps_exp,
                    height: k.height,
                    field,
                }
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, f) in &other.terms {
            out.add_field(*k, f.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, f)| (*k, f.scale(c))).collect() }
    }

    /// Multiplies by `i^a h^b ε^c`.
    pub fn shift(&self, i_exp: u32, h_exp: u32, eps_exp: i32) -> Self {
        let mut out = Self::zero();
        for t in self.raw_terms() {
            out.push(AlgebraTerm {
                i_exp: ((t.i_exp as u32 + i_exp) % 4) as u8,
                h_exp: t.h_exp + h_exp,
                eps_exp: t.eps_exp + eps_exp,
                ..t
            });
        }
        out
    }

    fn raw_terms(&self) -> impl Iterator<Item = AlgebraTerm> + '_ {
        self.terms.iter().map(|(k, f)| AlgebraTerm {
            coeff: Rational::one(),
            i_exp: k.i_exp,
            h_exp: k.h_exp,
            eps_exp: k.eps_exp,
            height: k.height,
            field: f.clone(),
        })
    }

    /// Maximum height over all terms.
    pub fn height(&self) -> Result<u32, SymError> {
        self.terms.keys().map(|k| k.height).max().ok_or(SymError::UndefinedHeight)
    }

    pub fn has_skew_parity(&self) -> bool {
        self.terms.keys().all(|k| k.i_exp as u32 % 2 == (k.height + 1) % 2)
    }

    /// Keeps only the terms selected by `keep`.
    pub fn filter<F: Fn(&TermKey) -> bool>(&self, keep: F) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, f)| (*k, f.clone()))
                .collect(),
        }
    }

    /// Drops every term that is asymptotically below a grade-`grade` Magnus
    /// truncation for all admissible `σ`.
    pub fn truncate_at(&self, grade: u32) -> Self {
        self.filter(|k| !is_negligible(k.h_exp as i64, k.eps_margin(), grade))
    }

    /// [`truncate_at`](Self::truncate_at) for the sixth-order (grade 5) expansion.
    pub fn truncate(&self) -> Self {
        self.truncate_at(5)
    }

    /// Applies a field map to every term, e.g. to substitute zero potentials.
    pub fn map_fields<F: Fn(&ScalarField) -> ScalarField>(&self, map: F) -> Self {
        let mut out = Self::zero();
        for (k, f) in &self.terms {
            out.add_field(*k, map(f));
        }
        out
    }

    /// Smallest `hExp` and smallest `epsExp − height` over the terms.
    pub(crate) fn lower_bounds(&self) -> Option<(i64, i64)> {
        let h = self.terms.keys().map(|k| k.h_exp as i64).min()?;
        let d = self.terms.keys().map(|k| k.eps_margin()).min()?;
        Some((h, d))
    }

    /// Bilinear commutator; term pairs rejected by `skip` are never expanded.
    pub(crate) fn commute_filtered<F>(
        &self,
        other: &Self,
        cap: u8,
        skip: F,
    ) -> Result<Self, SymError>
    where
        F: Fn(&TermKey, &TermKey) -> bool,
    {
        let mut out = Self::zero();
        for (ka, fa) in &self.terms {
            for (kb, fb) in &other.terms {
                if skip(ka, kb) {
                    continue;
                }
                let i_exp = (ka.i_exp + kb.i_exp) % 4;
                let (sign, i_exp) = if i_exp >= 2 { (-1, i_exp - 2) } else { (1, i_exp) };
                for (height, field) in jordan_commutator(ka.height, fa, kb.height, fb, cap)? {
                    let key = TermKey {
                        h_exp: ka.h_exp + kb.h_exp,
                        height,
                        eps_exp: ka.eps_exp + kb.eps_exp,
                        i_exp,
                    };
                    let field = if sign < 0 { -&field } else { field };
                    out.add_field(key, field);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for AlgebraTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg = self.coeff.is_negative();
        let mag = self.coeff.abs();
        if neg {
            f.write_str("−")?;
        }
        if !mag.is_one() {
            if mag.is_integer() {
                write!(f, "{mag}")?;
            } else {
                write!(f, "({mag})")?;
            }
        }
        if self.i_exp == 1 {
            f.write_str("i")?;
        }
        match self.h_exp {
            0 => {}
            1 => f.write_str("h")?,
            n => write!(f, "h{}", superscript(n as i64))?,
        }
        match self.eps_exp {
            0 => {}
            1 => f.write_str("ε")?,
            n => write!(f, "ε{}", superscript(n as i64))?,
        }
        write!(f, "⟨{}|{}⟩", self.height, self.field)
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms().iter().enumerate() {
            let s = t.to_string();
            if i == 0 {
                f.write_str(&s)?;
            } else if let Some(rest) = s.strip_prefix('−') {
                write!(f, " − {rest}")?;
            } else {
                write!(f, " + {s}")?;
            }
        }
        Ok(())
    }
}
