//! Exact scalar fields: rational polynomials in spatial derivatives of the
//! quadrature potentials `Ṽ₀`, `Ṽ₁`, `Ṽ₂`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{Rational, SymError};

/// Largest spatial derivative order a field may carry unless configured otherwise.
pub const DEFAULT_DERIVATIVE_CAP: u8 = 8;

/// Number of potential slots (`Ṽ₀`, `Ṽ₁`, `Ṽ₂`).
pub const SLOTS: u8 = 3;

/// `∂ₓᵐṼⱼ`. Ordered by `(slot, order)`, which is the canonical factor order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DerivativeAtom {
    slot: u8,
    order: u8,
}

impl DerivativeAtom {
    pub fn new(slot: u8, order: u8) -> Result<Self, SymError> {
        Self::with_cap(slot, order, DEFAULT_DERIVATIVE_CAP)
    }

    pub fn with_cap(slot: u8, order: u8, cap: u8) -> Result<Self, SymError> {
        if slot >= SLOTS {
            return Err(SymError::BadSlot(slot));
        }
        if order > cap {
            return Err(SymError::DerivativeCap { slot, order, cap });
        }
        Ok(Self { slot, order })
    }

    pub fn slot(&self) -> u8 {
        self.slot
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    fn differentiated(self, cap: u8) -> Result<Self, SymError> {
        Self::with_cap(self.slot, self.order + 1, cap)
    }
}

impl fmt::Display for DerivativeAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order {
            0 => write!(f, "V{}", self.slot),
            1 => write!(f, "∂V{}", self.slot),
            m => write!(f, "∂{}V{}", superscript(m as i64), self.slot),
        }
    }
}

/// A single coefficient times a product of atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: Rational,
    pub factors: Vec<DerivativeAtom>,
}

impl Monomial {
    pub fn new(coeff: Rational, mut factors: Vec<DerivativeAtom>) -> Self {
        factors.sort_unstable();
        Self { coeff, factors }
    }
}

/// Sum of monomials with distinct factor multisets and nonzero coefficients.
///
/// Equality is structural on the canonical form, so two fields compare equal
/// exactly when they are the same polynomial.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScalarField {
    terms: BTreeMap<Vec<DerivativeAtom>, Rational>,
}

impl ScalarField {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The constant function `1`.
    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut f = Self::zero();
        f.add_monomial(Vec::new(), c);
        f
    }

    pub fn atom(atom: DerivativeAtom) -> Self {
        let mut f = Self::zero();
        f.add_monomial(vec![atom], Rational::one());
        f
    }

    /// `∂ₓᵐṼⱼ` with the default cap. Panics on an invalid slot or order, so
    /// reserve it for literal construction.
    pub fn derivative(slot: u8, order: u8) -> Self {
        Self::atom(DerivativeAtom::new(slot, order).expect("valid derivative atom"))
    }

    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(monomials: I) -> Self {
        let mut f = Self::zero();
        for m in monomials {
            let mut factors = m.factors;
            factors.sort_unstable();
            f.add_monomial(factors, m.coeff);
        }
        f
    }

    fn add_monomial(&mut self, factors: Vec<DerivativeAtom>, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(factors) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
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

    /// True when the field is a (possibly zero) constant.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| k.is_empty())
    }

    /// Value of the constant monomial.
    pub fn constant_part(&self) -> Rational {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&[DerivativeAtom], &Rational)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (fa, ca) in &self.terms {
            for (fb, cb) in &other.terms {
                let mut factors = Vec::with_capacity(fa.len() + fb.len());
                factors.extend_from_slice(fa);
                factors.extend_from_slice(fb);
                factors.sort_unstable();
                out.add_monomial(factors, ca * cb);
            }
        }
        out
    }

    /// `dᵗ/dxᵗ` by the product rule, failing if any atom would exceed `cap`.
    pub fn differentiate_capped(&self, times: u32, cap: u8) -> Result<Self, SymError> {
        let mut cur = self.clone();
        for _ in 0..times {
            let mut next = Self::zero();
            for (factors, c) in &cur.terms {
                for i in 0..factors.len() {
                    let mut fs = factors.clone();
                    fs[i] = fs[i].differentiated(cap)?;
                    fs.sort_unstable();
                    next.add_monomial(fs, c.clone());
                }
            }
            cur = next;
        }
        Ok(cur)
    }

    pub fn differentiate(&self, times: u32) -> Result<Self, SymError> {
        self.differentiate_capped(times, DEFAULT_DERIVATIVE_CAP)
    }

    /// Replaces every atom of `slot` by zero.
    pub fn without_slot(&self, slot: u8) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.iter().all(|a| a.slot != slot))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Highest derivative order of each slot appearing in the field.
    pub fn max_orders(&self) -> [Option<u8>; SLOTS as usize] {
        let mut out = [None; SLOTS as usize];
        for atom in self.terms.keys().flatten() {
            let e = &mut out[atom.slot as usize];
            *e = Some(e.map_or(atom.order, |o: u8| o.max(atom.order)));
        }
        out
    }

    /// Splits the field as `content · primitive` with an integer primitive
    /// part whose first monomial is positive.
    pub fn content(&self) -> (Rational, ScalarField) {
        use num_integer::Integer;
        let mut num = num_bigint::BigInt::zero();
        let mut den = num_bigint::BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return (Rational::zero(), Self::zero());
        }
        let mut content = Rational::new(num, den);
        if self.terms.values().next().is_some_and(|c| c.is_negative()) {
            content = -content;
        }
        let inv = content.recip();
        (content, self.scale(&inv))
    }

    /// Evaluates the polynomial given a value for every atom.
    pub fn evaluate<F: FnMut(DerivativeAtom) -> f64>(&self, mut atom_value: F) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| rational_to_f64(c) * k.iter().map(|a| atom_value(*a)).product::<f64>())
            .sum()
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().expect("rational coefficient representable as f64")
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_monomial(k.clone(), v.clone());
        }
        out
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_monomial(k.clone(), -v.clone());
        }
        out
    }
}

impl Mul for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: &ScalarField) -> ScalarField {
        self.multiply(rhs)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (factors, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("−")?;
                }
            } else {
                f.write_str(if neg { " − " } else { " + " })?;
            }
            let unit = mag.is_one();
            if !unit || factors.is_empty() {
                write!(f, "{mag}")?;
            }
            let mut j = 0;
            while j < factors.len() {
                let a = factors[j];
                let mut n = 1;
                while j + n < factors.len() && factors[j + n] == a {
                    n += 1;
                }
                if n == 1 {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "({a}){}", superscript(n as i64))?;
                }
                j += n;
            }
        }
        Ok(())
    }
}

pub(crate) fn superscript(n: i64) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    let mut s = String::new();
    if n < 0 {
        s.push('⁻');
    }
    for ch in n.unsigned_abs().to_string().chars() {
        s.push(DIGITS[ch.to_digit(10).unwrap() as usize]);
    }
    s
}
