//! The free Lie algebra over `Z` on letters `0..N`, realized inside the
//! truncated tensor algebra. Letter `a` is the variable `X_{a+1}` of
//! [`NcPoly`], and the alphabet order is the numeric order of the letters.
//!
//! Coordinates in the Lyndon basis are read off by repeatedly cancelling the
//! lexicographically smallest word: the standard bracketing of a Lyndon word
//! `w` expands to `w` plus larger words only.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::lattice::{Lattice, SparseRow};
use crate::magnus::{Mono, NcPoly};

/// A Lie element, stored as its image in the tensor algebra.
#[derive(Clone, PartialEq, Eq)]
pub struct LieElem {
    nletters: usize,
    coords: NcPoly,
}

impl LieElem {
    pub fn zero(nletters: usize, maxdeg: usize) -> Self {
        LieElem { nletters, coords: NcPoly::zero(nletters, maxdeg) }
    }

    /// The letter `a` (0-based) as a degree-1 element.
    pub fn generator(nletters: usize, maxdeg: usize, a: usize) -> Result<Self, Error> {
        if a >= nletters {
            return Err(Error::Index(format!("letter {a} of {nletters}")));
        }
        Ok(LieElem { nletters, coords: NcPoly::var(nletters, maxdeg, a + 1) })
    }

    /// Wraps a tensor polynomial after checking that each homogeneous part
    /// rewrites to zero in the Lyndon basis.
    pub fn from_poly(poly: NcPoly) -> Result<Self, Error> {
        let nletters = poly.nvars();
        if !poly.coeff(&Mono(Vec::new())).is_zero() {
            return Err(Error::Precondition("constant term in a Lie element".into()));
        }
        for d in 1..=poly.maxdeg() {
            let part = poly.homogeneous_part(d);
            if !part.is_zero() {
                LyndonTable::new(nletters, d)?.rewrite(&part)?;
            }
        }
        Ok(LieElem { nletters, coords: poly })
    }

    pub fn nletters(&self) -> usize {
        self.nletters
    }

    pub fn maxdeg(&self) -> usize {
        self.coords.maxdeg()
    }

    pub fn coords(&self) -> &NcPoly {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }

    /// The common degree of all terms; `None` for zero or mixed degrees.
    pub fn degree(&self) -> Option<usize> {
        let mut degs = self.coords.terms().map(|(m, _)| m.degree());
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    pub fn add(&self, other: &LieElem) -> LieElem {
        LieElem { nletters: self.nletters, coords: self.coords.add(&other.coords) }
    }

    pub fn sub(&self, other: &LieElem) -> LieElem {
        LieElem { nletters: self.nletters, coords: self.coords.sub(&other.coords) }
    }

    pub fn scale(&self, k: &BigInt) -> LieElem {
        LieElem { nletters: self.nletters, coords: self.coords.scale(k) }
    }

    /// Left-normed bracket `[self, t_1, ..., t_k]`.
    pub fn bracket_all(&self, tail: &[LieElem]) -> Result<LieElem, Error> {
        tail.iter().try_fold(self.clone(), |acc, t| bracket(&acc, t))
    }
}

impl std::fmt::Debug for LieElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

fn top_degree(p: &NcPoly) -> usize {
    p.terms().map(|(m, _)| m.degree()).max().unwrap_or(0)
}

/// `[a, b] = ab − ba`. Fails if the result would not fit below the truncation.
pub fn bracket(a: &LieElem, b: &LieElem) -> Result<LieElem, Error> {
    if a.nletters != b.nletters {
        return Err(Error::RankMismatch { left: a.nletters, right: b.nletters });
    }
    if a.maxdeg() != b.maxdeg() {
        return Err(Error::Precondition(format!(
            "truncation degrees differ: {} and {}",
            a.maxdeg(),
            b.maxdeg()
        )));
    }
    let d = top_degree(&a.coords) + top_degree(&b.coords);
    if d > a.maxdeg() && !a.is_zero() && !b.is_zero() {
        return Err(Error::Precondition(format!(
            "bracket of degree {d} exceeds truncation {}",
            a.maxdeg()
        )));
    }
    let ab = a.coords.mul(&b.coords);
    let ba = b.coords.mul(&a.coords);
    Ok(LieElem { nletters: a.nletters, coords: ab.sub(&ba) })
}

fn mobius(mut n: u64) -> i64 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Rank of the degree-`c` part of the free Lie algebra on `n` letters.
pub fn witt(n: u64, c: u64) -> u64 {
    assert!(c >= 1, "degree must be positive");
    let mut total = BigInt::zero();
    for d in (1..=c).filter(|d| c.is_multiple_of(*d)) {
        let mu = mobius(d);
        if mu != 0 {
            total += BigInt::from(mu) * num_traits::pow(BigInt::from(n), (c / d) as usize);
        }
    }
    (total / BigInt::from(c)).to_u64().expect("witt number fits in u64")
}

/// Lyndon words of length exactly `m` over `n` letters, in lexicographic order.
pub fn lyndon_words(n: usize, m: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    if n == 0 || m == 0 {
        return out;
    }
    let top = n as i32 - 1;
    let mut w: Vec<i32> = vec![-1];
    while !w.is_empty() {
        *w.last_mut().unwrap() += 1;
        if w.len() == m {
            out.push(w.iter().map(|&x| x as u16).collect());
        }
        let k = w.len();
        while w.len() < m {
            w.push(w[w.len() - k]);
        }
        while w.last() == Some(&top) {
            w.pop();
        }
    }
    out
}

fn is_lyndon(w: &[u16]) -> bool {
    (1..w.len()).all(|i| w < &w[i..])
}

/// `(u, v)` with `w = uv` and `v` the longest proper Lyndon suffix.
pub fn standard_factorization(w: &[u16]) -> Option<(&[u16], &[u16])> {
    (1..w.len()).find(|&i| is_lyndon(&w[i..])).map(|i| w.split_at(i))
}

/// The standard bracketing of a Lyndon word, letters printed 1-based as `y1, y2, ...`.
pub fn render_bracketing(w: &[u16]) -> String {
    match standard_factorization(w) {
        None => format!("y{}", w[0] + 1),
        Some((u, v)) => format!("[{},{}]", render_bracketing(u), render_bracketing(v)),
    }
}

/// Lyndon words of one degree with their standard bracketings.
pub struct LyndonTable {
    nletters: usize,
    degree: usize,
    words: Vec<Vec<u16>>,
    expansions: Vec<NcPoly>,
    /// Keyed by 1-based monomial.
    index: HashMap<Mono, usize>,
}

impl LyndonTable {
    pub fn new(nletters: usize, degree: usize) -> Result<Self, Error> {
        if nletters == 0 {
            return Err(Error::ZeroRank);
        }
        if degree == 0 {
            return Err(Error::Precondition("degree must be at least 1".into()));
        }
        let words = lyndon_words(nletters, degree);
        let mut memo = HashMap::new();
        let expansions: Vec<NcPoly> =
            words.iter().map(|w| standard_bracketing(nletters, degree, w, &mut memo)).collect();
        let index = words.iter().enumerate().map(|(k, w)| (mono_of(w), k)).collect();
        Ok(LyndonTable { nletters, degree, words, expansions, index })
    }

    pub fn nletters(&self) -> usize {
        self.nletters
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Vec<u16>] {
        &self.words
    }

    /// The basis element for the `k`-th word, truncated at `maxdeg`.
    pub fn element(&self, k: usize, maxdeg: usize) -> LieElem {
        let mut coords = NcPoly::zero(self.nletters, maxdeg);
        for (m, c) in self.expansions[k].terms() {
            coords.add_term(m.clone(), c.clone());
        }
        LieElem { nletters: self.nletters, coords }
    }

    /// Lyndon coordinates of a homogeneous polynomial of this degree.
    fn rewrite(&self, part: &NcPoly) -> Result<SparseRow<BigInt>, Error> {
        let mut rem = NcPoly::zero(self.nletters, self.degree);
        for (m, c) in part.terms() {
            if m.degree() != self.degree {
                return Err(Error::Precondition(format!(
                    "element is not homogeneous of degree {}",
                    self.degree
                )));
            }
            rem.add_term(m.clone(), c.clone());
        }
        let mut out = Vec::new();
        while let Some((m, c)) = rem.leading() {
            let Some(&k) = self.index.get(m) else {
                return Err(Error::Precondition(format!(
                    "{m:?} is not a Lyndon word; the element is not a Lie element"
                )));
            };
            let c = c.clone();
            rem.add_scaled(&-&c, &self.expansions[k]);
            out.push((k as u32, c));
        }
        out.sort_by_key(|e| e.0);
        Ok(out)
    }

    /// Lyndon coordinates of a Lie element homogeneous of this degree.
    pub fn coordinates(&self, e: &LieElem) -> Result<SparseRow<BigInt>, Error> {
        if e.nletters != self.nletters {
            return Err(Error::RankMismatch { left: self.nletters, right: e.nletters });
        }
        self.rewrite(&e.coords)
    }

    /// The element with the given Lyndon coordinates.
    pub fn from_coordinates(&self, row: &[(u32, BigInt)], maxdeg: usize) -> LieElem {
        let mut coords = NcPoly::zero(self.nletters, maxdeg);
        for (k, c) in row {
            coords.add_scaled(c, &self.element(*k as usize, maxdeg).coords);
        }
        LieElem { nletters: self.nletters, coords }
    }

    /// The lattice spanned by homogeneous elements of this degree.
    pub fn lattice_of(&self, spanning: &[LieElem]) -> Result<GradedLattice, Error> {
        let rows: Vec<SparseRow<BigInt>> =
            spanning.par_iter().map(|e| self.coordinates(e)).collect::<Result<_, _>>()?;
        let mut lattice = Lattice::new(self.len());
        for row in rows {
            lattice.insert_big(row);
        }
        Ok(GradedLattice { degree: self.degree, nletters: self.nletters, lattice })
    }
}

fn mono_of(w: &[u16]) -> Mono {
    Mono(w.iter().map(|&a| a + 1).collect())
}

fn standard_bracketing(
    nletters: usize,
    degree: usize,
    w: &[u16],
    memo: &mut HashMap<Vec<u16>, NcPoly>,
) -> NcPoly {
    if let Some(p) = memo.get(w) {
        return p.clone();
    }
    let p = match standard_factorization(w) {
        None => NcPoly::monomial(nletters, degree, mono_of(w), BigInt::one()),
        Some((u, v)) => {
            let pu = standard_bracketing(nletters, degree, u, memo);
            let pv = standard_bracketing(nletters, degree, v, memo);
            pu.mul(&pv).sub(&pv.mul(&pu))
        }
    };
    memo.insert(w.to_vec(), p.clone());
    p
}

/// Standard bracketings of the Lyndon words of degree `m` on `n` letters.
pub fn lyndon_basis(n: usize, m: usize) -> Result<Vec<LieElem>, Error> {
    let table = LyndonTable::new(n, m)?;
    Ok((0..table.len()).map(|k| table.element(k, m)).collect())
}

/// Degree-`m` Lyndon basis of the free Lie algebra on the sub-alphabet
/// `letters` (listed in increasing order), inside the algebra on `n` letters.
pub fn lyndon_basis_on(
    n: usize,
    letters: &[usize],
    m: usize,
    maxdeg: usize,
) -> Result<Vec<LieElem>, Error> {
    if letters.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::Precondition("sub-alphabet must be increasing".into()));
    }
    if let Some(&a) = letters.iter().find(|&&a| a >= n) {
        return Err(Error::Index(format!("letter {a} of {n}")));
    }
    let gens: Vec<LieElem> =
        letters.iter().map(|&a| LieElem::generator(n, maxdeg, a)).collect::<Result<_, _>>()?;
    let mut memo: HashMap<Vec<u16>, LieElem> = HashMap::new();
    fn build(
        w: &[u16],
        gens: &[LieElem],
        memo: &mut HashMap<Vec<u16>, LieElem>,
    ) -> Result<LieElem, Error> {
        if let Some(e) = memo.get(w) {
            return Ok(e.clone());
        }
        let e = match standard_factorization(w) {
            None => gens[w[0] as usize].clone(),
            Some((u, v)) => bracket(&build(u, gens, memo)?, &build(v, gens, memo)?)?,
        };
        memo.insert(w.to_vec(), e.clone());
        Ok(e)
    }
    lyndon_words(letters.len(), m).iter().map(|w| build(w, &gens, &mut memo)).collect()
}

/// A sublattice of `Z^{witt(N, m)}` in Lyndon coordinates.
#[derive(Debug, Clone)]
pub struct GradedLattice {
    pub degree: usize,
    pub nletters: usize,
    pub lattice: Lattice,
}

impl GradedLattice {
    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }
}

/// The lattice spanned by homogeneous degree-`m` elements.
pub fn lattice_of(spanning: &[LieElem], n: usize, m: usize) -> Result<GradedLattice, Error> {
    LyndonTable::new(n, m)?.lattice_of(spanning)
}

pub fn lattice_rank(l: &GradedLattice) -> usize {
    l.rank()
}

pub fn lattice_equal(a: &GradedLattice, b: &GradedLattice) -> bool {
    a.degree == b.degree && a.nletters == b.nletters && a.lattice.lattice_eq(&b.lattice)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectSumReport {
    pub degree: usize,
    pub ranks: Vec<usize>,
    pub rank_sum: usize,
    pub witt: u64,
    /// Rank of the sum of the parts; equals `rank_sum` iff the sum is direct.
    pub sum_rank: usize,
    /// Smith invariants of the stacked bases are all 1.
    pub snf_ones: bool,
}

impl DirectSumReport {
    pub fn passed(&self) -> bool {
        self.rank_sum as u64 == self.witt && self.sum_rank == self.rank_sum && self.snf_ones
    }
}

/// Whether the parts form a direct sum equal to the whole of degree `m`.
pub fn lattice_direct_sum_is_whole(
    parts: &[GradedLattice],
    m: usize,
) -> Result<DirectSumReport, Error> {
    let Some(first) = parts.first() else {
        return Err(Error::Precondition("no parts".into()));
    };
    let n = first.nletters;
    if let Some(p) = parts.iter().find(|p| p.nletters != n || p.degree != m) {
        return Err(Error::Precondition(format!(
            "part of degree {} on {} letters, expected degree {m} on {n}",
            p.degree, p.nletters
        )));
    }
    let witt_nm = witt(n as u64, m as u64);
    let mut stacked = Lattice::new(first.lattice.dim());
    for p in parts {
        for row in p.lattice.basis_rows() {
            stacked.insert_big(row);
        }
    }
    let ranks: Vec<usize> = parts.iter().map(GradedLattice::rank).collect();
    let rank_sum = ranks.iter().sum();
    let sum_rank = stacked.rank();
    let snf_ones = sum_rank as u64 == witt_nm && stacked.smith_invariants().iter().all(One::is_one);
    Ok(DirectSumReport { degree: m, ranks, rank_sum, witt: witt_nm, sum_rank, snf_ones })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(n: usize, a: usize, maxdeg: usize) -> LieElem {
        LieElem::generator(n, maxdeg, a).unwrap()
    }

    #[test]
    fn bracketings() {
        assert_eq!(render_bracketing(&[0, 1]), "[y1,y2]");
        assert_eq!(render_bracketing(&[0, 0, 1]), "[y1,[y1,y2]]");
        assert_eq!(render_bracketing(&[0, 1, 1]), "[[y1,y2],y2]");
    }

    #[test]
    fn witt_values() {
        assert_eq!(witt(2, 2), 1);
        assert_eq!(witt(3, 3), 8);
        assert_eq!(witt(7, 1), 7);
        // independent values from the necklace count
        assert_eq!(witt(5, 2), 10);
        assert_eq!(witt(5, 3), 40);
        assert_eq!(witt(5, 4), 150);
        assert_eq!(witt(5, 5), 624);
        assert_eq!(witt(9, 2), 36);
        assert_eq!(witt(9, 4), 1620);
        assert_eq!(witt(2, 6), 9);
    }

    #[test]
    fn mobius_values() {
        let got: Vec<i64> = (1..=12).map(mobius).collect();
        assert_eq!(got, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
    }

    /// Brute force: a word is Lyndon iff it is strictly smaller than all its
    /// proper rotations.
    fn brute_lyndon(n: usize, m: usize) -> Vec<Vec<u16>> {
        let mut out = Vec::new();
        for code in 0..n.pow(m as u32) {
            let mut w = vec![0u16; m];
            let mut c = code;
            for slot in w.iter_mut().rev() {
                *slot = (c % n) as u16;
                c /= n;
            }
            let rotations_larger = (1..m).all(|i| {
                let r: Vec<u16> = w[i..].iter().chain(&w[..i]).copied().collect();
                w < r
            });
            if rotations_larger {
                out.push(w);
            }
        }
        out
    }

    #[test]
    fn lyndon_words_match_brute_force_and_witt() {
        for n in 1usize..=6 {
            for m in 1..=6 {
                if n.pow(m as u32) <= 50_000 {
                    assert_eq!(lyndon_words(n, m), brute_lyndon(n, m), "n={n} m={m}");
                }
                assert_eq!(lyndon_words(n, m).len() as u64, witt(n as u64, m as u64));
            }
        }
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(lyndon_basis(2, 2).unwrap().len(), 1);
        assert_eq!(lyndon_basis(3, 2).unwrap().len(), 3);
        assert_eq!(lyndon_basis(5, 3).unwrap().len(), 40);
    }

    #[test]
    fn bracket_of_generators() {
        let (a, b) = (y(2, 0, 2), y(2, 1, 2));
        let ab = bracket(&a, &b).unwrap();
        let expect = NcPoly::monomial(2, 2, Mono(vec![1, 2]), BigInt::one())
            .sub(&NcPoly::monomial(2, 2, Mono(vec![2, 1]), BigInt::one()));
        assert_eq!(ab.coords(), &expect);
        assert!(bracket(&a, &a).unwrap().is_zero());
        assert_eq!(lyndon_basis(2, 2).unwrap()[0], ab);
    }

    #[test]
    fn jacobi_and_degree() {
        let (a, b, c) = (y(3, 0, 3), y(3, 1, 3), y(3, 2, 3));
        let t1 = a.bracket_all(&[b.clone(), c.clone()]).unwrap();
        let t2 = b.bracket_all(&[c.clone(), a.clone()]).unwrap();
        let t3 = c.bracket_all(&[a, b]).unwrap();
        assert!(t1.add(&t2).add(&t3).is_zero());
        assert_eq!(t1.degree(), Some(3));
    }

    #[test]
    fn truncation_overflow_is_an_error() {
        let (a, b) = (y(2, 0, 2), y(2, 1, 2));
        let ab = bracket(&a, &b).unwrap();
        assert!(matches!(bracket(&ab, &a), Err(Error::Precondition(_))));
    }

    #[test]
    fn coordinates_round_trip() {
        let table = LyndonTable::new(3, 4).unwrap();
        for k in 0..table.len() {
            let e = table.element(k, 4);
            assert_eq!(table.coordinates(&e).unwrap(), vec![(k as u32, BigInt::one())]);
        }
        let row = vec![(0u32, BigInt::from(3)), (5, BigInt::from(-2)), (17, BigInt::from(7))];
        let e = table.from_coordinates(&row, 4);
        assert_eq!(table.coordinates(&e).unwrap(), row);
    }

    #[test]
    fn non_lie_polynomial_is_rejected() {
        let p = NcPoly::monomial(2, 2, Mono(vec![2, 1]), BigInt::one());
        assert!(LieElem::from_poly(p).is_err());
        let p = NcPoly::monomial(2, 2, Mono(vec![1, 1]), BigInt::one());
        assert!(LieElem::from_poly(p).is_err());
        let ok = bracket(&y(2, 1, 3), &y(2, 0, 3)).unwrap();
        assert!(LieElem::from_poly(ok.coords().clone()).is_ok());
    }

    #[test]
    fn lattice_identities() {
        let whole = lattice_of(&lyndon_basis(3, 2).unwrap(), 3, 2).unwrap();
        let report = lattice_direct_sum_is_whole(std::slice::from_ref(&whole), 2).unwrap();
        assert!(report.passed());
        // a different spanning set of the same lattice
        let (a, b, c) = (y(3, 0, 2), y(3, 1, 2), y(3, 2, 2));
        let alt = [
            bracket(&b, &a).unwrap(),
            bracket(&a, &c).unwrap().add(&bracket(&b, &c).unwrap()),
            bracket(&c, &b).unwrap(),
            bracket(&a, &b).unwrap().add(&bracket(&a, &c).unwrap()),
        ];
        let alt = lattice_of(&alt, 3, 2).unwrap();
        assert!(lattice_equal(&whole, &alt));
        let doubled =
            lattice_of(&[bracket(&a, &b).unwrap().scale(&BigInt::from(2))], 3, 2).unwrap();
        let rest = lattice_of(&[bracket(&a, &c).unwrap(), bracket(&b, &c).unwrap()], 3, 2).unwrap();
        let report = lattice_direct_sum_is_whole(&[doubled, rest], 2).unwrap();
        assert_eq!(report.rank_sum, 3);
        assert!(!report.snf_ones && !report.passed());
    }

    #[test]
    fn sub_alphabet_basis_embeds() {
        let part = lyndon_basis_on(5, &[2, 3, 4], 3, 3).unwrap();
        assert_eq!(part.len(), 8);
        let table = LyndonTable::new(5, 3).unwrap();
        for e in &part {
            let row = table.coordinates(e).unwrap();
            assert_eq!(row.len(), 1);
            assert!(table.words()[row[0].0 as usize].iter().all(|&a| a >= 2));
        }
    }
}
