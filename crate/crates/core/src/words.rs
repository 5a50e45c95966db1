//! Freely reduced words in a free group of finite rank.
//!
//! A letter is a nonzero `i32`: `+i` is the generator with index `i`
//! (1-based) and `-i` its inverse. Exponent syntax is expanded on parse, so
//! a word is always a flat sequence of single letters.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::parse::{self, Gen};

/// Signed generator index; never zero.
pub type Letter = i32;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FreeWord {
    rank: usize,
    letters: Vec<Letter>,
}

/// Pushes `x` onto a reduced buffer, cancelling against the last letter.
#[inline]
fn push_reduced(buf: &mut Vec<Letter>, x: Letter) {
    if buf.last() == Some(&-x) {
        buf.pop();
    } else {
        buf.push(x);
    }
}

impl FreeWord {
    pub fn identity(rank: usize) -> Self {
        FreeWord { rank, letters: Vec::new() }
    }

    pub fn generator(rank: usize, index: usize) -> Result<Self, Error> {
        Self::new(rank, vec![index as Letter])
    }

    /// Builds a word from raw letters, freely reducing them.
    pub fn new(rank: usize, letters: Vec<Letter>) -> Result<Self, Error> {
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        for &x in &letters {
            if x == 0 || x.unsigned_abs() as usize > rank {
                return Err(Error::LetterOutOfRange { letter: x, rank });
            }
        }
        Ok(Self::from_reduced_iter(rank, letters))
    }

    /// Crate-internal constructor for letters already known to be in range.
    pub(crate) fn from_letters(rank: usize, letters: impl IntoIterator<Item = Letter>) -> Self {
        Self::from_reduced_iter(rank, letters)
    }

    fn from_reduced_iter(rank: usize, letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut buf = Vec::new();
        for x in letters {
            debug_assert!(x != 0 && x.unsigned_abs() as usize <= rank);
            push_reduced(&mut buf, x);
        }
        FreeWord { rank, letters: buf }
    }

    pub fn rank(&self) -> usize {
        self.rank
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

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Reinterprets the word in a free group of larger (or equal) rank.
    pub fn widen(&self, rank: usize) -> Result<FreeWord, Error> {
        if self.letters.iter().any(|x| x.unsigned_abs() as usize > rank) {
            return Err(Error::RankMismatch { left: self.rank, right: rank });
        }
        Ok(FreeWord { rank, letters: self.letters.clone() })
    }

    pub fn multiply(&self, other: &FreeWord) -> Result<FreeWord, Error> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { left: self.rank, right: other.rank });
        }
        Ok(self.concat(other))
    }

    /// Product of words of equal rank; the caller guarantees the ranks agree.
    pub(crate) fn concat(&self, other: &FreeWord) -> FreeWord {
        debug_assert_eq!(self.rank, other.rank);
        let mut buf = Vec::with_capacity(self.len() + other.len());
        buf.extend_from_slice(&self.letters);
        for &x in &other.letters {
            push_reduced(&mut buf, x);
        }
        FreeWord { rank: self.rank, letters: buf }
    }

    /// `self` followed by a single letter.
    pub(crate) fn push_letter(&self, x: Letter) -> FreeWord {
        let mut buf = self.letters.clone();
        push_reduced(&mut buf, x);
        FreeWord { rank: self.rank, letters: buf }
    }

    /// A single letter followed by `self`.
    pub(crate) fn prepend_letter(&self, x: Letter) -> FreeWord {
        if self.letters.first() == Some(&-x) {
            FreeWord { rank: self.rank, letters: self.letters[1..].to_vec() }
        } else {
            let mut buf = Vec::with_capacity(self.len() + 1);
            buf.push(x);
            buf.extend_from_slice(&self.letters);
            FreeWord { rank: self.rank, letters: buf }
        }
    }

    pub fn invert(&self) -> FreeWord {
        FreeWord { rank: self.rank, letters: self.letters.iter().rev().map(|x| -x).collect() }
    }

    pub fn pow(&self, k: i64) -> FreeWord {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut acc = FreeWord::identity(self.rank);
        for _ in 0..k.unsigned_abs() {
            acc = acc.concat(&base);
        }
        acc
    }

    /// `self · w · self⁻¹`.
    pub fn conjugate(&self, w: &FreeWord) -> FreeWord {
        self.concat(w).concat(&self.invert())
    }

    /// Group commutator `[a, b] = a⁻¹ b⁻¹ a b`.
    pub fn commutator(a: &FreeWord, b: &FreeWord) -> FreeWord {
        a.invert().concat(&b.invert()).concat(a).concat(b)
    }

    /// Left-normed commutator `[w1, w2, ..., wk]`; a single word is returned as is.
    pub fn left_normed(words: &[FreeWord]) -> Option<FreeWord> {
        let (first, rest) = words.split_first()?;
        Some(rest.iter().fold(first.clone(), |acc, w| FreeWord::commutator(&acc, w)))
    }

    /// Splits the word as `conjugator · core · conjugator⁻¹` with `core`
    /// cyclically reduced.
    pub fn cyclic_reduce(&self) -> (FreeWord, FreeWord) {
        let w = &self.letters;
        let mut c = 0;
        while w.len() >= 2 * c + 2 && w[c] == -w[w.len() - 1 - c] {
            c += 1;
        }
        let core = FreeWord { rank: self.rank, letters: w[c..w.len() - c].to_vec() };
        let conj = FreeWord { rank: self.rank, letters: w[..c].to_vec() };
        (core, conj)
    }

    /// Exponent sum of every generator, indexed `0..rank`.
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank];
        for &x in &self.letters {
            v[x.unsigned_abs() as usize - 1] += x.signum() as i64;
        }
        v
    }

    /// The element `r` with `self = r^e`, `e ≥ 1` maximal; the identity is its own root.
    pub fn root(&self) -> (FreeWord, u32) {
        let (core, conj) = self.cyclic_reduce();
        let n = core.len();
        if n == 0 {
            return (self.clone(), 1);
        }
        for d in 1..=n {
            if n % d == 0 && (d..n).all(|i| core.letters[i] == core.letters[i - d]) {
                let base = FreeWord { rank: self.rank, letters: core.letters[..d].to_vec() };
                return (conj.conjugate(&base), (n / d) as u32);
            }
        }
        unreachable!("d = n always matches")
    }

    /// Finds `g` with `g · a · g⁻¹ = b`, or `None` when `a` and `b` are not
    /// conjugate. The returned witness is the leftmost rotation match and is
    /// checked by multiplication before it is returned.
    pub fn free_conjugate(a: &FreeWord, b: &FreeWord) -> Result<Option<FreeWord>, Error> {
        if a.rank != b.rank {
            return Err(Error::RankMismatch { left: a.rank, right: b.rank });
        }
        let (ca, pa) = a.cyclic_reduce();
        let (cb, pb) = b.cyclic_reduce();
        if ca.len() != cb.len() {
            return Ok(None);
        }
        let n = ca.len();
        let rotation =
            (0..n.max(1)).find(|&k| (0..n).all(|i| ca.letters[(i + k) % n] == cb.letters[i]));
        let Some(k) = rotation else {
            return Ok(None);
        };
        // cb = ca[k..] ca[..k] = ca[..k]⁻¹ · ca · ca[..k]
        let shift = FreeWord { rank: a.rank, letters: ca.letters[..k.min(n)].to_vec() };
        let g = pb.concat(&shift.invert()).concat(&pa.invert());
        debug_assert_eq!(&g.conjugate(a), b);
        if &g.conjugate(a) != b {
            return Ok(None);
        }
        Ok(Some(g))
    }

    /// Parses a word over `x1..x{rank}` in the shared word grammar.
    pub fn parse(s: &str, rank: usize) -> Result<FreeWord, Error> {
        let terms = parse::parse_terms(s)?;
        let mut letters = Vec::new();
        for t in terms {
            let Gen::X(i) = t.gen else {
                return Err(Error::WrongAlphabet { column: t.column, expected: "x" });
            };
            if i == 0 || i > rank {
                return Err(Error::LetterOutOfRange { letter: i as Letter, rank });
            }
            letters.extend(parse::expand(i as Letter, t.exponent));
        }
        FreeWord::new(rank, letters)
    }

    /// Renders the word using `name` for each generator index.
    pub fn render(&self, name: impl Fn(usize) -> String) -> String {
        let mut out = String::new();
        for (pos, &x) in self.letters.iter().enumerate() {
            if pos > 0 {
                out.push(' ');
            }
            out.push_str(&name(x.unsigned_abs() as usize));
            if x < 0 {
                out.push_str("^-1");
            }
        }
        out
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|i| format!("x{i}")))
    }
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeWord[{}]({:?})", self.rank, self.to_string())
    }
}

impl Mul for &FreeWord {
    type Output = FreeWord;

    /// Panics on rank mismatch; use [`FreeWord::multiply`] for a fallible product.
    fn mul(self, rhs: &FreeWord) -> FreeWord {
        self.multiply(rhs).expect("rank mismatch in word product")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str, rank: usize) -> FreeWord {
        FreeWord::parse(s, rank).unwrap()
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(&w("x1 x2", 3) * &w("x2^-1 x1", 3), w("x1 x1", 3));
        assert_eq!(&w("", 3) * &w("x3", 3), w("x3", 3));
        assert!((&w("x1 x2 x1^-1", 3) * &w("x1 x2^-1 x1^-1", 3)).is_identity());
    }

    #[test]
    fn rank_mismatch_is_an_error() {
        assert!(matches!(
            w("x1", 2).multiply(&w("x1", 3)),
            Err(Error::RankMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(w("x1 x2", 2).invert(), w("x2^-1 x1^-1", 2));
        assert_eq!(w("", 2).invert(), w("", 2));
        assert_eq!(w("x1^-1", 2).invert(), w("x1", 2));
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (core, conj) = w("x1 x2 x1^-1", 2).cyclic_reduce();
        assert_eq!((core, conj), (w("x2", 2), w("x1", 2)));

        let (core, conj) = w("x1 x2", 2).cyclic_reduce();
        assert_eq!((core, conj), (w("x1 x2", 2), w("", 2)));

        let a = w("x2^-1 x1 x2 x2", 2);
        let (core, conj) = a.cyclic_reduce();
        assert_eq!(conj, w("x2^-1", 2));
        // core is a rotation of "x2 x1"
        assert!(core == w("x2 x1", 2) || core == w("x1 x2", 2));
        assert_eq!(conj.conjugate(&core), a);
    }

    #[test]
    fn free_conjugate_examples() {
        let g = FreeWord::free_conjugate(&w("x1 x2", 2), &w("x2 x1", 2)).unwrap().unwrap();
        assert_eq!(g.conjugate(&w("x1 x2", 2)), w("x2 x1", 2));
        assert_eq!(FreeWord::free_conjugate(&w("x1", 2), &w("x2", 2)).unwrap(), None);
        assert_eq!(FreeWord::free_conjugate(&w("x1 x1", 2), &w("x1", 2)).unwrap(), None);
    }

    #[test]
    fn free_conjugate_of_identity() {
        let e = FreeWord::identity(2);
        assert_eq!(FreeWord::free_conjugate(&e, &e).unwrap(), Some(e.clone()));
        assert_eq!(FreeWord::free_conjugate(&e, &w("x1", 2)).unwrap(), None);
    }

    #[test]
    fn roots() {
        let (r, e) = w("x1 x2 x1 x2 x1 x2", 2).root();
        assert_eq!((r, e), (w("x1 x2", 2), 3));
        let (r, e) = w("x2 x1 x1 x2^-1", 2).root();
        assert_eq!((r, e), (w("x2 x1 x2^-1", 2), 2));
    }

    #[test]
    fn exponent_expansion_and_rendering() {
        assert_eq!(w("x1^3", 1).letters(), &[1, 1, 1]);
        assert_eq!(w("x2^-2 x1", 2).to_string(), "x2^-1 x2^-1 x1");
        assert_eq!(w("x1^0", 1).to_string(), "");
    }

    #[test]
    fn out_of_range_letters_are_rejected() {
        assert!(FreeWord::parse("x4", 3).is_err());
        assert!(FreeWord::new(2, vec![0]).is_err());
        assert!(FreeWord::parse("y(2,1)", 3).is_err());
    }
}
