//! Commutator identities for Jordan-product terms `⟨k|f⟩ = ½(f∘∂ᵏ + ∂ᵏ∘f)`.
//!
//! Only the pairs listed in [`SUPPORTED_PAIRS`] are known; anything else is
//! reported as [`SymError::TableIncomplete`].

use num_traits::One;

use super::field::ScalarField;
use super::{Rational, SymError};

/// Height pairs `(k, l)`, `k ≥ l`, for which `[⟨k|f⟩, ⟨l|g⟩]` has a closed form.
pub const SUPPORTED_PAIRS: [(u32, u32); 9] =
    [(4, 0), (3, 2), (3, 0), (2, 2), (2, 1), (2, 0), (1, 1), (1, 0), (0, 0)];

struct Derivs {
    d: Vec<ScalarField>,
}

impl Derivs {
    fn new(f: &ScalarField, upto: u32, cap: u8) -> Result<Self, SymError> {
        let mut d = vec![f.clone()];
        for _ in 0..upto {
            let next = d.last().unwrap().differentiate_capped(1, cap)?;
            d.push(next);
        }
        Ok(Self { d })
    }

    fn get(&self, n: usize) -> &ScalarField {
        &self.d[n]
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Linear combination `Σ cᵢ·aᵢ·bᵢ` of field products.
fn combo(parts: &[(Rational, &ScalarField, &ScalarField)]) -> ScalarField {
    parts
        .iter()
        .fold(ScalarField::zero(), |acc, (c, a, b)| &acc + &a.multiply(b).scale(c))
}

/// Orders of derivatives needed on `f` and `g` for the pair `(k, l)`.
fn derivative_depth(k: u32, l: u32) -> (u32, u32) {
    match (k, l) {
        (3, 2) => (5, 5),
        (4, 0) | (3, 0) | (2, 2) | (2, 1) => (3, 3),
        _ => (1, 1),
    }
}

/// `[⟨k|f⟩, ⟨l|g⟩]` as a list of `(height, field)` pieces.
pub fn jordan_commutator(
    k: u32,
    f: &ScalarField,
    l: u32,
    g: &ScalarField,
    cap: u8,
) -> Result<Vec<(u32, ScalarField)>, SymError> {
    if k < l {
        let swapped = jordan_commutator(l, g, k, f, cap)?;
        return Ok(swapped.into_iter().map(|(h, fld)| (h, -&fld)).collect());
    }
    if !SUPPORTED_PAIRS.contains(&(k, l)) {
        return Err(SymError::TableIncomplete { k, l });
    }
    if (k, l) == (0, 0) {
        return Ok(Vec::new());
    }
    let (df, dg) = derivative_depth(k, l);
    let f = Derivs::new(f, df, cap)?;
    let g = Derivs::new(g, dg, cap)?;
    let one = Rational::one;
    let (f0, g0) = (f.get(0), g.get(0));
    let (f1, g1) = (f.get(1), g.get(1));

    let pieces = match (k, l) {
        (4, 0) => vec![
            (3, combo(&[(q(4, 1), f0, g1)])),
            (1, combo(&[(q(-6, 1), f1, g.get(2)), (q(-2, 1), f0, g.get(3))])),
        ],
        (3, 2) => vec![
            (4, combo(&[(q(3, 1), f0, g1), (q(-2, 1), f1, g0)])),
            (
                2,
                combo(&[
                    (q(-7, 2), f0, g.get(3)),
                    (q(3, 2), f.get(3), g0),
                    (q(-15, 2), f1, g.get(2)),
                    (q(3, 1), f.get(2), g1),
                ]),
            ),
            (
                0,
                combo(&[
                    (q(3, 4), f0, g.get(5)),
                    (q(-1, 4), f.get(5), g0),
                    (q(3, 1), f1, g.get(4)),
                    (q(7, 2), f.get(2), g.get(3)),
                    (q(-1, 1), f.get(4), g1),
                ]),
            ),
        ],
        (3, 0) => vec![
            (2, combo(&[(q(3, 1), f0, g1)])),
            (0, combo(&[(q(-3, 2), f1, g.get(2)), (q(-1, 2), f0, g.get(3))])),
        ],
        (2, 2) => vec![
            (3, combo(&[(q(2, 1), f0, g1), (q(-2, 1), f1, g0)])),
            (
                1,
                combo(&[
                    (q(2, 1), f.get(2), g1),
                    (q(-2, 1), f1, g.get(2)),
                    (one(), f.get(3), g0),
                    (-one(), f0, g.get(3)),
                ]),
            ),
        ],
        (2, 1) => vec![
            (2, combo(&[(q(2, 1), f0, g1), (-one(), f1, g0)])),
            (0, combo(&[(-one(), f1, g.get(2)), (q(-1, 2), f0, g.get(3))])),
        ],
        (2, 0) => vec![(1, combo(&[(q(2, 1), f0, g1)]))],
        (1, 1) => vec![(1, combo(&[(one(), f0, g1), (-one(), f1, g0)]))],
        (1, 0) => vec![(0, combo(&[(one(), f0, g1)]))],
        _ => unreachable!("pair checked against SUPPORTED_PAIRS"),
    };
    Ok(pieces.into_iter().filter(|(_, fld)| !fld.is_zero()).collect())
}
