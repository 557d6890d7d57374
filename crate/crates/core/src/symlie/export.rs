//! JSON export/import of splitting schemes and text renderings.

use std::fmt::Write as _;
use std::str::FromStr;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::algebra::{AlgebraTerm, LieElement};
use super::field::{DerivativeAtom, Monomial, ScalarField};
use super::zassenhaus::SplittingScheme;
use super::{Rational, SymError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeDocument {
    pub exponents: Vec<ExponentDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentDoc {
    pub weight: String,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct TermDoc {
    pub coeff: String,
    pub i_exp: u8,
    pub h_exp: u32,
    pub eps_exp: i32,
    pub height: u32,
    pub field: Vec<MonomialDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialDoc {
    pub coeff: String,
    /// `[order, slot]` pairs.
    pub atoms: Vec<[u8; 2]>,
}

fn rational_str(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_rational(s: &str) -> Result<Rational, SymError> {
    let bad = || SymError::Import(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = num_bigint::BigInt::from_str(n.trim()).map_err(|_| bad())?;
    let d = num_bigint::BigInt::from_str(d.trim()).map_err(|_| bad())?;
    if d == num_bigint::BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

fn element_doc(e: &LieElement, weight: &Rational) -> ExponentDoc {
    ExponentDoc {
        weight: rational_str(weight),
        terms: e
            .terms()
            .into_iter()
            .map(|t| TermDoc {
                coeff: rational_str(&t.coeff),
                i_exp: t.i_exp,
                h_exp: t.h_exp,
                eps_exp: t.eps_exp,
                height: t.height,
                field: t
                    .field
                    .monomials()
                    .map(|(atoms, c)| MonomialDoc {
                        coeff: rational_str(c),
                        atoms: atoms.iter().map(|a| [a.order(), a.slot()]).collect(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

fn element_from_doc(doc: &ExponentDoc) -> Result<LieElement, SymError> {
    let mut out = LieElement::zero();
    for t in &doc.terms {
        let mut monomials = Vec::with_capacity(t.field.len());
        for m in &t.field {
            let atoms = m
                .atoms
                .iter()
                .map(|[order, slot]| DerivativeAtom::new(*slot, *order))
                .collect::<Result<Vec<_>, _>>()?;
            monomials.push(Monomial::new(parse_rational(&m.coeff)?, atoms));
        }
        out.push(AlgebraTerm::new(
            parse_rational(&t.coeff)?,
            t.i_exp as u32,
            t.h_exp,
            t.eps_exp,
            t.height,
            ScalarField::from_monomials(monomials),
        ));
    }
    Ok(out)
}

/// Outer exponents (weight ½) in order, then the central one (weight 1).
pub fn to_document(scheme: &SplittingScheme) -> SchemeDocument {
    let half = Rational::new(1.into(), 2.into());
    let mut exponents: Vec<ExponentDoc> =
        scheme.outer.iter().map(|w| element_doc(w, &half)).collect();
    exponents.push(element_doc(&scheme.central, &Rational::one()));
    SchemeDocument { exponents }
}

pub fn from_document(doc: &SchemeDocument) -> Result<SplittingScheme, SymError> {
    let (central, outer) = doc
        .exponents
        .split_last()
        .ok_or_else(|| SymError::Import("no exponents".into()))?;
    let half = Rational::new(1.into(), 2.into());
    for e in outer {
        if parse_rational(&e.weight)? != half {
            return Err(SymError::Import(format!("outer exponent with weight {}", e.weight)));
        }
    }
    if !parse_rational(&central.weight)?.is_one() {
        return Err(SymError::Import(format!("central exponent with weight {}", central.weight)));
    }
    Ok(SplittingScheme {
        outer: outer.iter().map(element_from_doc).collect::<Result<_, _>>()?,
        central: element_from_doc(central)?,
    })
}

pub fn to_json(scheme: &SplittingScheme) -> String {
    serde_json::to_string_pretty(&to_document(scheme)).expect("scheme document serializes")
}

pub fn from_json(text: &str) -> Result<SplittingScheme, SymError> {
    let doc: SchemeDocument =
        serde_json::from_str(text).map_err(|e| SymError::Import(e.to_string()))?;
    from_document(&doc)
}

fn exponent_names(scheme: &SplittingScheme) -> Vec<String> {
    let mut names: Vec<String> = (0..scheme.outer.len()).map(|k| format!("W[{k}]")).collect();
    names.push(format!("𝒲[{}]", scheme.outer.len()));
    names
}

/// One line per exponent in the `⟨k|f⟩` notation.
pub fn pretty(scheme: &SplittingScheme) -> String {
    let mut s = String::new();
    let names = exponent_names(scheme);
    let elements = scheme.outer.iter().chain(std::iter::once(&scheme.central));
    for (name, e) in names.iter().zip(elements) {
        let _ = writeln!(s, "{name} = {e}");
    }
    let order: Vec<String> = scheme
        .factors()
        .iter()
        .enumerate()
        .map(|(i, (_, w))| {
            let idx = if i < scheme.outer.len() {
                i
            } else {
                2 * scheme.outer.len() - i
            };
            let name = &names[idx.min(names.len() - 1)];
            if *w == 1.0 {
                format!("exp({name})")
            } else {
                format!("exp(½{name})")
            }
        })
        .collect();
    let _ = writeln!(s, "step = {}", order.join(" "));
    s
}

fn latex_atom(a: &DerivativeAtom) -> String {
    match a.order() {
        0 => format!("\\tilde V_{}", a.slot()),
        1 => format!("\\partial_x \\tilde V_{}", a.slot()),
        m => format!("\\partial_x^{{{m}}} \\tilde V_{}", a.slot()),
    }
}

fn latex_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

fn latex_field(f: &ScalarField) -> String {
    let mut s = String::new();
    for (i, (atoms, c)) in f.monomials().enumerate() {
        let neg = c.is_negative();
        if i > 0 {
            s.push_str(if neg { " - " } else { " + " });
        } else if neg {
            s.push('-');
        }
        let mag = c.abs();
        if !mag.is_one() || atoms.is_empty() {
            s.push_str(&latex_rational(&mag));
        }
        for a in atoms {
            let _ = write!(s, "({})", latex_atom(a));
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

fn latex_element(e: &LieElement) -> String {
    let mut s = String::new();
    for (i, t) in e.terms().iter().enumerate() {
        let neg = t.coeff.is_negative();
        if i > 0 {
            s.push_str(if neg { " - " } else { " + " });
        } else if neg {
            s.push('-');
        }
        let mag = t.coeff.abs();
        if !mag.is_one() {
            s.push_str(&latex_rational(&mag));
        }
        if t.i_exp == 1 {
            s.push_str("\\mathrm{i}");
        }
        match t.h_exp {
            0 => {}
            1 => s.push_str(" h"),
            n => {
                let _ = write!(s, " h^{{{n}}}");
            }
        }
        match t.eps_exp {
            0 => {}
            1 => s.push_str(" \\varepsilon"),
            n => {
                let _ = write!(s, " \\varepsilon^{{{n}}}");
            }
        }
        let _ = write!(s, " \\langle {} | {} \\rangle", t.height, latex_field(&t.field));
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

pub fn latex(scheme: &SplittingScheme) -> String {
    let mut s = String::new();
    let n = scheme.outer.len();
    for (k, w) in scheme.outer.iter().enumerate() {
        let _ = writeln!(s, "W^{{[{k}]}} &=& {} \\\\", latex_element(w));
    }
    let _ = writeln!(s, "\\mathcal{{W}}^{{[{n}]}} &=& {}", latex_element(&scheme.central));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-3/6").unwrap(), Rational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational("4").unwrap(), Rational::from_integer(4.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn weights_are_checked() {
        let doc = SchemeDocument {
            exponents: vec![
                ExponentDoc { weight: "1/3".into(), terms: vec![] },
                ExponentDoc { weight: "1/1".into(), terms: vec![] },
            ],
        };
        assert!(from_document(&doc).is_err());
        assert!(from_document(&SchemeDocument { exponents: vec![] }).is_err());
    }
}
