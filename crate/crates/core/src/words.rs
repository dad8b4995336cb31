//! Reduced words in free groups and their evaluation in arbitrary groups.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("cannot parse word {input:?}: {reason}")]
pub struct WordParseError {
    pub input: String,
    pub reason: String,
}

/// A generator or its inverse. Generator `0` prints as `a`, its inverse as `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub generator: u8,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: u8, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inv(self) -> Letter {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    /// Position among the `2k` letters: `a, A, b, B, …`.
    pub fn ordinal(self) -> u32 {
        2 * self.generator as u32 + self.inverse as u32
    }

    pub fn from_ordinal(o: u32) -> Letter {
        Letter::new((o / 2) as u8, o % 2 == 1)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = (b'a' + self.generator) as char;
        if self.inverse {
            write!(f, "{}", c.to_ascii_uppercase())
        } else {
            write!(f, "{c}")
        }
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct FreeWord {
    letters: Vec<Letter>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord::default()
    }

    pub fn letter(l: Letter) -> Self {
        FreeWord { letters: vec![l] }
    }

    pub fn generator(g: u8) -> Self {
        FreeWord::letter(Letter::new(g, false))
    }

    /// Reduces the given letters.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord { letters: out }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        FreeWord::from_letters(self.letters.iter().chain(&other.letters).copied())
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    /// Evaluates the word with `gens[i] = (image of generator i, its inverse)`;
    /// `mul(x, y)` is the product `x·y`, acting as `y` first.
    pub fn evaluate<G: Clone>(&self, identity: G, gens: &[(G, G)], mul: impl Fn(&G, &G) -> G) -> G {
        self.letters.iter().fold(identity, |acc, l| {
            let (g, ginv) = &gens[l.generator as usize];
            mul(&acc, if l.inverse { ginv } else { g })
        })
    }

    pub fn max_generator(&self) -> Option<u8> {
        self.letters.iter().map(|l| l.generator).max()
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl From<FreeWord> for String {
    fn from(w: FreeWord) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for FreeWord {
    type Error = WordParseError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Accepts `aBA`, `a b a⁻¹`, `a b a^-1`, and `e` for the identity.
impl FromStr for FreeWord {
    type Err = WordParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| WordParseError {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let normalized = s.replace("⁻¹", "'").replace("^-1", "'");
        let mut letters: Vec<Letter> = Vec::new();
        for c in normalized.chars() {
            match c {
                ' ' | '·' | '*' => {}
                'e' if normalized.trim() == "e" => {}
                '\'' => {
                    let last = letters.pop().ok_or_else(|| err("inverse mark without a letter"))?;
                    letters.push(last.inv());
                }
                c if c.is_ascii_lowercase() => letters.push(Letter::new(c as u8 - b'a', false)),
                c if c.is_ascii_uppercase() => {
                    letters.push(Letter::new(c.to_ascii_lowercase() as u8 - b'a', true))
                }
                _ => return Err(err(&format!("unexpected character {c:?}"))),
            }
        }
        Ok(FreeWord::from_letters(letters))
    }
}

/// Number of reduced words of length `len` over `k` generators.
pub fn reduced_word_count(k: u8, len: u32) -> u128 {
    if len == 0 {
        return 1;
    }
    let k = k as u128;
    2 * k * (2 * k - 1).pow(len - 1)
}

/// Position of `w` in the shortlex enumeration of reduced words over `k`
/// generators (`e, a, A, b, B, aa, ab, …`).
pub fn shortlex_index(w: &FreeWord, k: u8) -> u128 {
    let len = w.len() as u32;
    let shorter: u128 = (0..len).map(|l| reduced_word_count(k, l)).sum();
    let base = 2 * k as u128 - 1;
    let mut rank: u128 = 0;
    let mut prev: Option<Letter> = None;
    for l in w.letters() {
        let o = l.ordinal() as u128;
        rank = match prev {
            None => o,
            Some(p) => {
                let skip = (p.inv().ordinal() as u128) < o;
                rank * base + o - skip as u128
            }
        };
        prev = Some(*l);
    }
    shorter + rank
}

/// Inverse of [`shortlex_index`].
pub fn shortlex_word(mut index: u128, k: u8) -> FreeWord {
    let mut len = 0u32;
    while index >= reduced_word_count(k, len) {
        index -= reduced_word_count(k, len);
        len += 1;
    }
    if len == 0 {
        return FreeWord::identity();
    }
    let base = 2 * k as u128 - 1;
    let mut digits = Vec::with_capacity(len as usize);
    for _ in 1..len {
        digits.push((index % base) as u32);
        index /= base;
    }
    digits.push(index as u32);
    digits.reverse();
    let mut letters = Vec::with_capacity(len as usize);
    let mut prev: Option<Letter> = None;
    for d in digits {
        let l = match prev {
            None => Letter::from_ordinal(d),
            Some(p) => {
                let forbidden = p.inv().ordinal();
                Letter::from_ordinal(if d >= forbidden { d + 1 } else { d })
            }
        };
        letters.push(l);
        prev = Some(l);
    }
    FreeWord { letters }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_reduce() {
        let w: FreeWord = "a b a⁻¹".parse().unwrap();
        assert_eq!(w.to_string(), "abA");
        let w2: FreeWord = "a b a^-1".parse().unwrap();
        assert_eq!(w, w2);
        let r: FreeWord = "abBA".parse().unwrap();
        assert!(r.is_empty());
        assert_eq!("e".parse::<FreeWord>().unwrap(), FreeWord::identity());
        assert!("a?".parse::<FreeWord>().is_err());
    }

    #[test]
    fn inverse_cancels() {
        let w: FreeWord = "abAAb".parse().unwrap();
        assert!(w.mul(&w.inverse()).is_empty());
    }

    #[test]
    fn evaluation_is_homomorphic_in_integers() {
        // a ↦ +1, b ↦ +10 in (ℤ, +)
        let gens = [(1i64, -1i64), (10, -10)];
        let eval = |w: &FreeWord| w.evaluate(0, &gens, |x, y| x + y);
        let u: FreeWord = "abA".parse().unwrap();
        let v: FreeWord = "bb".parse().unwrap();
        assert_eq!(eval(&u.mul(&v)), eval(&u) + eval(&v));
    }

    #[test]
    fn shortlex_roundtrip_and_order() {
        assert_eq!(shortlex_index(&FreeWord::identity(), 2), 0);
        assert_eq!(shortlex_word(1, 2).to_string(), "a");
        assert_eq!(shortlex_word(2, 2).to_string(), "A");
        assert_eq!(shortlex_word(5, 2).to_string(), "aa");
        for i in 0..400u128 {
            assert_eq!(shortlex_index(&shortlex_word(i, 2), 2), i);
        }
        for i in 0..50u128 {
            assert_eq!(shortlex_index(&shortlex_word(i, 3), 3), i);
        }
    }
}
