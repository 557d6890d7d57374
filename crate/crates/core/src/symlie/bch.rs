//! Symmetric Baker–Campbell–Hausdorff formula through grade five,
//! `log(e^{X/2} e^{Y} e^{X/2})`, over any algebra with a bracket.

use std::collections::HashMap;

use num_traits::Zero;

use super::Rational;

/// An algebra in which the sBCH series can be evaluated.
///
/// `pending` lists the letters that will still be bracketed onto the result
/// from the left; implementations may use it to skip work whose outcome is
/// discarded anyway.
pub trait BracketAlgebra: Clone {
    type Error;
    type Context: ?Sized;

    fn zero_like(&self) -> Self;
    fn add_scaled(&self, other: &Self, c: &Rational) -> Self;
    fn bracket(
        &self,
        other: &Self,
        pending: &[&Self],
        ctx: &Self::Context,
    ) -> Result<Self, Self::Error>;
}

/// Coefficients of right-nested brackets in `X` and `Y`. The word `"YXXY"`
/// stands for `[Y,[X,[X,Y]]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SbchTable {
    entries: Vec<(String, Rational)>,
}

impl SbchTable {
    /// The grade-3 and grade-5 coefficients. Even grades vanish by symmetry.
    pub fn standard() -> Self {
        let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
        Self {
            entries: vec![
                ("XXY".into(), q(-1, 24)),
                ("YXY".into(), q(-1, 12)),
                ("XXXXY".into(), q(7, 5760)),
                ("YXXXY".into(), q(1, 360)),
                ("XYXXY".into(), q(1, 480)),
                ("YYXXY".into(), q(1, 120)),
                ("XYYXY".into(), q(-1, 360)),
                ("YYYXY".into(), q(1, 720)),
            ],
        }
    }

    pub fn entries(&self) -> &[(String, Rational)] {
        &self.entries
    }

    /// Replaces the coefficient of `word`; returns false if the word is absent.
    pub fn set(&mut self, word: &str, coeff: Rational) -> bool {
        match self.entries.iter_mut().find(|(w, _)| w == word) {
            Some(e) => {
                e.1 = coeff;
                true
            }
            None => false,
        }
    }

    pub fn get(&self, word: &str) -> Option<&Rational> {
        self.entries.iter().find(|(w, _)| w == word).map(|(_, c)| c)
    }
}

impl Default for SbchTable {
    fn default() -> Self {
        Self::standard()
    }
}

/// `Z` with `e^{X/2} e^{Y} e^{X/2} = e^{Z}` up to grade-7 brackets.
pub fn sbch_with<A: BracketAlgebra>(
    table: &SbchTable,
    x: &A,
    y: &A,
    ctx: &A::Context,
) -> Result<A, A::Error> {
    let mut cache: HashMap<(String, usize, usize), A> = HashMap::new();
    let mut z = x.add_scaled(y, &Rational::from_integer(1.into()));
    for (word, coeff) in table.entries() {
        if coeff.is_zero() {
            continue;
        }
        let value = nested(word.as_bytes(), x, y, ctx, &mut cache)?;
        z = z.add_scaled(&value, coeff);
    }
    Ok(z)
}

fn nested<A: BracketAlgebra>(
    word: &[u8],
    x: &A,
    y: &A,
    ctx: &A::Context,
    cache: &mut HashMap<(String, usize, usize), A>,
) -> Result<A, A::Error> {
    let letter = |c: u8| if c == b'X' { x } else { y };
    let n = word.len();
    let mut acc = letter(word[n - 1]).clone();
    for i in (0..n - 1).rev() {
        let prefix = &word[..i];
        let nx = prefix.iter().filter(|&&c| c == b'X').count();
        let key = (String::from_utf8_lossy(&word[i..]).into_owned(), nx, prefix.len() - nx);
        if let Some(hit) = cache.get(&key) {
            acc = hit.clone();
            continue;
        }
        let pending: Vec<&A> = prefix.iter().map(|&c| letter(c)).collect();
        acc = letter(word[i]).bracket(&acc, &pending, ctx)?;
        cache.insert(key, acc.clone());
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_and_get() {
        let mut t = SbchTable::standard();
        assert_eq!(t.entries().len(), 8);
        let new = Rational::new(1.into(), 1000.into());
        assert!(t.set("XXY", new.clone()));
        assert_eq!(t.get("XXY"), Some(&new));
        assert!(!t.set("XY", new));
    }
}
