//! Arithmetic in `I_n` through the normal form `w_n w_{n-1} ... w_2`, where
//! `w_i` is a word in the free factor `H_i = ⟨y(i,1), ..., y(i,i)⟩ ≅ F_i`.
//!
//! A component `w_i` is stored as a [`FreeWord`] of rank `i` whose letter `k`
//! stands for `y(i,k)`. Lower factors act on higher ones by conjugation: for
//! `j < i` the generator `y(j,k)` sends `y(i,l)` to `y(i,k) y(i,l) y(i,k)⁻¹`
//! when `l ≤ j` and `l ≠ k`, and fixes it otherwise. As an automorphism of
//! `F_i` this is exactly `y_gen(i, j, k)⁻¹`, which is how it is computed.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::endos::EndoF;
use crate::error::Error;
use crate::parse::{self, Gen};
use crate::rng::Lcg64;
use crate::words::{FreeWord, Letter};

/// One letter `y(m,i)^sign` of a word in the generators of `I_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct YLetter {
    pub m: usize,
    pub i: usize,
    pub sign: i32,
}

impl YLetter {
    pub fn new(m: usize, i: usize, sign: i32) -> Self {
        YLetter { m, i, sign }
    }

    pub fn inverse(self) -> Self {
        YLetter { sign: -self.sign, ..self }
    }
}

pub type YWord = Vec<YLetter>;

pub fn yword_inverse(w: &[YLetter]) -> YWord {
    w.iter().rev().map(|l| l.inverse()).collect()
}

/// Group commutator `[a, b] = a⁻¹ b⁻¹ a b` of generator words.
pub fn yword_commutator(a: &[YLetter], b: &[YLetter]) -> YWord {
    let mut out = yword_inverse(a);
    out.extend(yword_inverse(b));
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out
}

pub fn render_yword(w: &[YLetter]) -> String {
    w.iter()
        .map(|l| {
            if l.sign < 0 {
                format!("y({},{})^-1", l.m, l.i)
            } else {
                format!("y({},{})", l.m, l.i)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses a word in the generators `y(m,i)` of `I_n`.
pub fn parse_yword(s: &str, n: usize) -> Result<YWord, Error> {
    let mut out = Vec::new();
    for t in parse::parse_terms(s)? {
        let Gen::Y(m, i) = t.gen else {
            return Err(Error::WrongAlphabet { column: t.column, expected: "y(m,i)" });
        };
        if m < 2 || m > n || i == 0 || i > m {
            return Err(Error::Parse {
                column: t.column,
                message: format!("y({m},{i}) is not a generator of I_{n}"),
            });
        }
        let sign = if t.exponent < 0 { -1 } else { 1 };
        out.extend(std::iter::repeat_n(
            YLetter::new(m, i, sign),
            t.exponent.unsigned_abs() as usize,
        ));
    }
    Ok(out)
}

/// Name of letter `k` of the free factor `H_level`.
pub fn factor_letter_name(level: usize, k: usize) -> String {
    format!("y({level},{k})")
}

/// Renders a word of `H_level` in `y(level, k)` notation.
pub fn render_factor_word(level: usize, w: &FreeWord) -> String {
    w.render(|k| factor_letter_name(level, k))
}

/// Parses a word of the free factor `H_level`.
pub fn parse_factor_word(s: &str, level: usize) -> Result<FreeWord, Error> {
    let mut letters = Vec::new();
    for t in parse::parse_terms(s)? {
        match t.gen {
            Gen::Y(m, k) if m == level && k >= 1 && k <= level => {
                letters.extend(parse::expand(k as Letter, t.exponent));
            }
            _ => {
                return Err(Error::Parse {
                    column: t.column,
                    message: format!("expected a letter y({level},k) of H_{level}"),
                })
            }
        }
    }
    FreeWord::new(level, letters)
}

/// The automorphism of `H_i` induced by `y(j,k)^sign`, `j < i`.
fn generator_action(i: usize, j: usize, k: usize, sign: i32) -> EndoF {
    let y = EndoF::y_gen(i, j, k).expect("generator indices are valid");
    if sign > 0 {
        y.inverse().expect("y_gen carries its inverse")
    } else {
        y
    }
}

/// The automorphism `b ↦ a b a⁻¹` of `H_i` for `a` a word of `H_j`, `j < i`.
pub fn act_endo(a: &FreeWord, i: usize) -> Result<EndoF, Error> {
    let j = a.rank();
    if j < 2 || j >= i {
        return Err(Error::Precondition(format!("H_{j} does not act on H_{i}")));
    }
    let mut out = EndoF::identity(i);
    for &x in a.letters() {
        let g = generator_action(i, j, x.unsigned_abs() as usize, x.signum());
        out = out.compose(&g)?;
    }
    Ok(out)
}

/// `a · b · a⁻¹` with `a ∈ H_j`, `b ∈ H_i` and `j < i`.
pub fn act(a: &FreeWord, b: &FreeWord) -> Result<FreeWord, Error> {
    act_endo(a, b.rank())?.apply(b)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IElem {
    n: usize,
    /// `comps[i - 2] = w_i`, a word of rank `i`.
    comps: Vec<FreeWord>,
}

impl IElem {
    pub fn identity(n: usize) -> Self {
        assert!(n >= 2, "I_n needs n >= 2");
        IElem { n, comps: (2..=n).map(FreeWord::identity).collect() }
    }

    /// Builds an element from its components listed as `(w_n, ..., w_2)`.
    pub fn from_components(n: usize, descending: Vec<FreeWord>) -> Result<Self, Error> {
        if n < 2 || descending.len() != n - 1 {
            return Err(Error::Precondition(format!(
                "I_{n} needs {} components, got {}",
                n.saturating_sub(1),
                descending.len()
            )));
        }
        let mut comps = descending;
        comps.reverse();
        for (idx, w) in comps.iter().enumerate() {
            if w.rank() != idx + 2 {
                return Err(Error::RankMismatch { left: idx + 2, right: w.rank() });
            }
        }
        Ok(IElem { n, comps })
    }

    pub fn gen_elem(n: usize, m: usize, i: usize) -> Result<Self, Error> {
        if m < 2 || m > n || i == 0 || i > m {
            return Err(Error::Index(format!("y({m},{i}) in I_{n}")));
        }
        let mut e = Self::identity(n);
        e.comps[m - 2] = FreeWord::from_letters(m, [i as Letter]);
        Ok(e)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The component `w_level`, `2 ≤ level ≤ n`.
    pub fn component(&self, level: usize) -> &FreeWord {
        &self.comps[level - 2]
    }

    pub(crate) fn set_component(&mut self, level: usize, w: FreeWord) {
        debug_assert_eq!(w.rank(), level);
        self.comps[level - 2] = w;
    }

    pub fn is_identity(&self) -> bool {
        self.comps.iter().all(FreeWord::is_identity)
    }

    /// Total letter count of the normal form.
    pub fn len(&self) -> usize {
        self.comps.iter().map(FreeWord::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    /// The element `w_{level-1} ... w_2` made of the components below `level`,
    /// embedded in `I_n`.
    pub fn below(&self, level: usize) -> IElem {
        let mut e = self.clone();
        for l in level..=self.n {
            e.comps[l - 2] = FreeWord::identity(l);
        }
        e
    }

    /// The action of `w_{level-1} ... w_2` on `H_level` by conjugation.
    pub fn lower_action(&self, level: usize) -> EndoF {
        let mut out = EndoF::identity(level);
        for j in (2..level).rev() {
            let w = &self.comps[j - 2];
            if !w.is_identity() {
                out = out.compose(&act_endo(w, level).expect("j < level")).expect("same rank");
            }
        }
        out
    }

    pub fn imul(&self, other: &IElem) -> Result<IElem, Error> {
        if self.n != other.n {
            return Err(Error::RankMismatch { left: self.n, right: other.n });
        }
        let mut out = IElem::identity(self.n);
        for level in 2..=self.n {
            let b = &other.comps[level - 2];
            let moved =
                if b.is_identity() { b.clone() } else { self.lower_action(level).apply_raw(b) };
            out.comps[level - 2] = self.comps[level - 2].concat(&moved);
        }
        Ok(out)
    }

    pub fn iinv(&self) -> IElem {
        let mut out = IElem::identity(self.n);
        for level in 2..=self.n {
            let w = self.comps[level - 2].invert();
            out.comps[level - 2] = out.lower_action(level).apply_raw(&w);
        }
        out
    }

    /// `y(m,i)^sign · self`, computed by acting on the components above `m`.
    pub fn left_mul_gen(&self, l: YLetter) -> IElem {
        let mut out = self.clone();
        for level in l.m + 1..=self.n {
            let w = &self.comps[level - 2];
            if !w.is_identity() {
                out.comps[level - 2] = generator_action(level, l.m, l.i, l.sign).apply_raw(w);
            }
        }
        out.comps[l.m - 2] = self.comps[l.m - 2].prepend_letter(l.sign * l.i as Letter);
        out
    }

    /// Normal form of a generator word.
    pub fn collect(n: usize, word: &[YLetter]) -> Result<IElem, Error> {
        if let Some(l) = word.iter().find(|l| l.m < 2 || l.m > n || l.i == 0 || l.i > l.m) {
            return Err(Error::Index(format!("y({},{}) in I_{n}", l.m, l.i)));
        }
        Ok(word.iter().rev().fold(IElem::identity(n), |acc, &l| acc.left_mul_gen(l)))
    }

    /// Parses a generator word and collects it.
    pub fn parse(s: &str, n: usize) -> Result<IElem, Error> {
        Self::collect(n, &parse_yword(s, n)?)
    }

    /// The normal form read back as a generator word `w_n ... w_2`.
    pub fn to_yword(&self) -> YWord {
        let mut out = Vec::new();
        for level in (2..=self.n).rev() {
            for &x in self.comps[level - 2].letters() {
                out.push(YLetter::new(level, x.unsigned_abs() as usize, x.signum()));
            }
        }
        out
    }

    /// The automorphism of `F_n` this element represents.
    pub fn to_endo(&self) -> EndoF {
        let mut out = EndoF::identity(self.n);
        for l in self.to_yword() {
            out = out.compose(&yletter_endo(self.n, l)).expect("same rank");
        }
        out
    }

    /// Exponent sums in the order `y(2,1), y(2,2), y(3,1), ..., y(n,n)`.
    pub fn abelianize(&self) -> Vec<i64> {
        self.comps.iter().flat_map(FreeWord::exponent_sums).collect()
    }

    /// Components keyed by level, as printed words.
    pub fn component_strings(&self) -> BTreeMap<usize, String> {
        (2..=self.n).map(|l| (l, render_factor_word(l, self.component(l)))).collect()
    }
}

impl fmt::Display for IElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_yword(&self.to_yword()))
    }
}

impl fmt::Debug for IElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IElem[{}](", self.n)?;
        for level in (2..=self.n).rev() {
            if level < self.n {
                f.write_str(" | ")?;
            }
            f.write_str(&render_factor_word(level, self.component(level)))?;
        }
        f.write_str(")")
    }
}

/// Number of generators of `I_n`, `(n-1)(n+2)/2`.
pub fn generator_count(n: usize) -> usize {
    (n - 1) * (n + 2) / 2
}

/// Generators `(m, i)` in the order `y(2,1) < y(2,2) < y(3,1) < ...`.
pub fn generators(n: usize) -> Vec<(usize, usize)> {
    (2..=n).flat_map(|m| (1..=m).map(move |i| (m, i))).collect()
}

/// Position of `y(m,i)` in [`generators`].
pub fn generator_index(m: usize, i: usize) -> usize {
    (m - 1) * m / 2 - 1 + (i - 1)
}

pub fn yletter_endo(n: usize, l: YLetter) -> EndoF {
    let y = EndoF::y_gen(n, l.m, l.i).expect("valid generator");
    if l.sign > 0 {
        y
    } else {
        y.inverse().expect("y_gen carries its inverse")
    }
}

/// Direct evaluation of a generator word as a composite automorphism.
pub fn evaluate_yword(n: usize, word: &[YLetter]) -> EndoF {
    word.iter()
        .fold(EndoF::identity(n), |acc, &l| acc.compose(&yletter_endo(n, l)).expect("same rank"))
}

pub fn word_problem(n: usize, word: &[YLetter]) -> Result<bool, Error> {
    Ok(IElem::collect(n, word)?.is_identity())
}

/// A uniformly random generator word of the given length.
pub fn random_yword(n: usize, len: usize, rng: &mut Lcg64) -> YWord {
    let gens = generators(n);
    (0..len)
        .map(|_| {
            let (m, i) = gens[rng.below(gens.len())];
            YLetter::new(m, i, rng.sign())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RelationKind {
    /// `[y(m,i), y(r,i)]`
    One,
    /// `[y(m,i), y(r,j)]` with `r < i`
    Two,
    /// `[y(m,i), y(r,j)] [y(m,i), y(m,j)]⁻¹` with `i, j ≤ r`, `i ≠ j`
    Three,
}

/// One instance of the defining relations of `I_n`; always `2 ≤ r < m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub kind: RelationKind,
    pub m: usize,
    pub r: usize,
    pub i: usize,
    pub j: usize,
}

impl Relation {
    /// The relator as a generator word.
    pub fn relator(&self) -> YWord {
        let Relation { kind, m, r, i, j } = *self;
        let y = |a, b| vec![YLetter::new(a, b, 1)];
        match kind {
            RelationKind::One => yword_commutator(&y(m, i), &y(r, i)),
            RelationKind::Two => yword_commutator(&y(m, i), &y(r, j)),
            RelationKind::Three => {
                let mut w = yword_commutator(&y(m, i), &y(r, j));
                w.extend(yword_inverse(&yword_commutator(&y(m, i), &y(m, j))));
                w
            }
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Relation { kind, m, r, i, j } = *self;
        match kind {
            RelationKind::One => write!(f, "[y({m},{i}), y({r},{i})]"),
            RelationKind::Two => write!(f, "[y({m},{i}), y({r},{j})]"),
            RelationKind::Three => {
                write!(f, "[y({m},{i}), y({r},{j})] [y({m},{i}), y({m},{j})]^-1")
            }
        }
    }
}

/// Every instance of the three relation families, grouped by kind.
pub fn defining_relations(n: usize) -> Vec<Relation> {
    let mut out = Vec::new();
    let pairs: Vec<(usize, usize)> = (2..=n).flat_map(|m| (2..m).map(move |r| (m, r))).collect();
    for &(m, r) in &pairs {
        for i in 1..=r {
            out.push(Relation { kind: RelationKind::One, m, r, i, j: i });
        }
    }
    for &(m, r) in &pairs {
        for i in r + 1..=m {
            for j in 1..=r {
                out.push(Relation { kind: RelationKind::Two, m, r, i, j });
            }
        }
    }
    for &(m, r) in &pairs {
        for i in 1..=r {
            for j in (1..=r).filter(|&j| j != i) {
                out.push(Relation { kind: RelationKind::Three, m, r, i, j });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub n: usize,
    pub instances: usize,
    pub failures: Vec<String>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Collects every defining relator and evaluates it as an automorphism.
pub fn check_relations(n: usize) -> RelationReport {
    let rels = defining_relations(n);
    let mut failures = Vec::new();
    for rel in &rels {
        let word = rel.relator();
        let nf = IElem::collect(n, &word).expect("relator letters are valid");
        if !nf.is_identity() {
            failures.push(format!("{rel}: normal form {nf:?}"));
        }
        if !evaluate_yword(n, &word).is_identity() {
            failures.push(format!("{rel}: nontrivial automorphism"));
        }
    }
    RelationReport { n, instances: rels.len(), failures }
}
