//! Johnson images of the lower central series of `I_n` inside the IA
//! filtration of `Aut(F_n)`, read through truncated Magnus expansions.
//!
//! A weight-`c` commutator of `I_n` lies in `I_{c+1}A`, and its image in
//! `I_{c+1}A / I_{c+2}A` is recorded as the degree-`c+1` parts of the Magnus
//! expansions of `f(x_i) x_i⁻¹`. Conjugating by an IA automorphism does not
//! move this image, so left-normed commutators of the generators span the
//! same lattice as all of `γ_c(I_n)`. All ranks here are bounded-degree
//! computations, not proofs.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::endos::EndoF;
use crate::error::Error;
use crate::igroup::{generators, IElem};
use crate::lattice::{Lattice, SparseRow};
use crate::lie::{lyndon_words, standard_factorization, witt};
use crate::magnus::{gamma_degree, ia_degree, johnson_image, Depth, NcPoly};
use crate::words::FreeWord;

/// Group commutator `[a, b] = a⁻¹ b⁻¹ a b` in `I_n`.
pub fn icommutator(a: &IElem, b: &IElem) -> Result<IElem, Error> {
    a.iinv().imul(&b.iinv())?.imul(a)?.imul(b)
}

/// Index tuples `(a_1, ..., a_c)` over `0..k` with `a_1 > a_2`; for `c = 1`
/// every single index.
fn commutator_indices(k: usize, c: usize) -> Vec<Vec<usize>> {
    if c == 0 {
        return Vec::new();
    }
    if c == 1 {
        return (0..k).map(|a| vec![a]).collect();
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    for a1 in 0..k {
        for a2 in 0..a1 {
            out.push(vec![a1, a2]);
        }
    }
    for _ in 2..c {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..k).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

fn left_normed_in(gens: &[IElem], idx: &[usize]) -> Result<IElem, Error> {
    let mut acc = gens[idx[0]].clone();
    for &a in &idx[1..] {
        acc = icommutator(&acc, &gens[a])?;
    }
    Ok(acc)
}

/// Left-normed commutators `[g_{a_1}, ..., g_{a_c}]` of the generators
/// `y(m,i)`, taken in the order `y(2,1) < y(2,2) < y(3,1) < ...`, with
/// `a_1 > a_2` and the remaining entries arbitrary. For `c = 1` these are the
/// generators themselves.
pub fn basic_commutators(n: usize, c: usize) -> Result<Vec<IElem>, Error> {
    if n < 2 {
        return Err(Error::ZeroRank);
    }
    if c == 0 {
        return Err(Error::Precondition("commutator weight must be at least 1".into()));
    }
    let gens = generators(n)
        .into_iter()
        .map(|(m, i)| IElem::gen_elem(n, m, i))
        .collect::<Result<Vec<_>, _>>()?;
    commutator_indices(gens.len(), c).par_iter().map(|t| left_normed_in(&gens, t)).collect()
}

/// The same enumeration restricted to the generators `y(level, ·)` of `H_level`.
pub fn factor_commutators(n: usize, level: usize, c: usize) -> Result<Vec<IElem>, Error> {
    if level < 2 || level > n {
        return Err(Error::Index(format!("factor H_{level} of I_{n}")));
    }
    if c == 0 {
        return Err(Error::Precondition("commutator weight must be at least 1".into()));
    }
    let gens = (1..=level).map(|i| IElem::gen_elem(n, level, i)).collect::<Result<Vec<_>, _>>()?;
    commutator_indices(gens.len(), c).par_iter().map(|t| left_normed_in(&gens, t)).collect()
}

/// Flattens Johnson components into one integer vector: the block of
/// generator `i` is followed by the degree-`d` monomials in base-`n` order.
fn flatten(images: &[NcPoly], rank: usize, d: usize) -> SparseRow<BigInt> {
    let block = rank.pow(d as u32);
    let mut row: SparseRow<BigInt> = Vec::new();
    for (i, p) in images.iter().enumerate() {
        for (mono, coef) in p.terms() {
            if mono.0.len() != d {
                continue;
            }
            let code = mono.0.iter().fold(0usize, |acc, &x| acc * rank + (x as usize - 1));
            row.push(((i * block + code) as u32, coef.clone()));
        }
    }
    row.sort_by_key(|(c, _)| *c);
    row
}

/// Integer matrix of Johnson images at degree `c + 1`, one row per input.
#[derive(Clone, Debug)]
pub struct JohnsonMatrix {
    rank: usize,
    degree: usize,
    rows: Vec<SparseRow<BigInt>>,
}

impl JohnsonMatrix {
    /// Rows for automorphisms of `F_rank` in `I_{c+1}A`, expanded to degree `maxdeg`.
    pub fn build(rank: usize, c: usize, maxdeg: usize, autos: &[EndoF]) -> Result<Self, Error> {
        if c == 0 || maxdeg < c + 2 {
            return Err(Error::Precondition(format!(
                "truncation degree {maxdeg} must be at least c + 2 = {}",
                c + 2
            )));
        }
        let rows = autos
            .par_iter()
            .map(|f| {
                if f.rank() != rank {
                    return Err(Error::RankMismatch { left: rank, right: f.rank() });
                }
                let images = johnson_image(f, c + 1, maxdeg)?;
                Ok(flatten(&images, rank, c + 1))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(JohnsonMatrix { rank, degree: c, rows })
    }

    /// Rows for elements of `I_n`.
    pub fn from_elements(
        n: usize,
        c: usize,
        maxdeg: usize,
        elems: &[IElem],
    ) -> Result<Self, Error> {
        let autos: Vec<EndoF> = elems.par_iter().map(IElem::to_endo).collect();
        Self::build(n, c, maxdeg, &autos)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of coordinates per row, `n · n^{c+1}`.
    pub fn width(&self) -> usize {
        self.rank * self.rank.pow(self.degree as u32 + 1)
    }

    pub fn rows(&self) -> &[SparseRow<BigInt>] {
        &self.rows
    }

    pub fn lattice(&self) -> Lattice {
        let mut lat = Lattice::new(self.width());
        for r in &self.rows {
            lat.insert_big(r.clone());
        }
        lat
    }

    pub fn rank(&self) -> usize {
        self.lattice().rank()
    }
}

fn check_truncation(c: usize, maxdeg: usize) -> Result<(), Error> {
    if c == 0 {
        return Err(Error::Precondition("commutator weight must be at least 1".into()));
    }
    if maxdeg < c + 2 {
        return Err(Error::Precondition(format!(
            "truncation degree {maxdeg} must be at least c + 2 = {}",
            c + 2
        )));
    }
    Ok(())
}

/// Rank of the weight-`c` Johnson lattice of `I_n` at truncation `maxdeg`.
pub fn l1_rank(n: usize, c: usize, maxdeg: usize) -> Result<usize, Error> {
    check_truncation(c, maxdeg)?;
    let elems = basic_commutators(n, c)?;
    Ok(JohnsonMatrix::from_elements(n, c, maxdeg, &elems)?.rank())
}

/// `Σ_{i=2}^n witt(i, c)`.
pub fn factor_witt_sum(n: usize, c: usize) -> u64 {
    (2..=n as u64).map(|i| witt(i, c as u64)).sum()
}

/// Ranks of the Johnson lattices of the factors `H_2, ..., H_n` and of
/// their sum, at one weight.
#[derive(Clone, Debug, Serialize)]
pub struct FactorRankReport {
    pub n: usize,
    pub c: usize,
    pub ranks: Vec<usize>,
    pub witt: Vec<u64>,
    pub sum_rank: usize,
}

impl FactorRankReport {
    /// Each factor has rank `witt(i, c)` and the sum is direct.
    pub fn passed(&self) -> bool {
        self.ranks.iter().zip(&self.witt).all(|(r, w)| *r as u64 == *w)
            && self.sum_rank == self.ranks.iter().sum::<usize>()
    }
}

pub fn factor_ranks(n: usize, c: usize, maxdeg: usize) -> Result<FactorRankReport, Error> {
    check_truncation(c, maxdeg)?;
    let mut total: Option<Lattice> = None;
    let mut ranks = Vec::new();
    let mut witts = Vec::new();
    for level in 2..=n {
        let elems = factor_commutators(n, level, c)?;
        let m = JohnsonMatrix::from_elements(n, c, maxdeg, &elems)?;
        let part = m.lattice();
        ranks.push(part.rank());
        witts.push(witt(level as u64, c as u64));
        let acc = total.get_or_insert_with(|| Lattice::new(m.width()));
        for r in m.rows() {
            acc.insert_big(r.clone());
        }
    }
    let sum_rank = total.map(|l| l.rank()).unwrap_or(0);
    Ok(FactorRankReport { n, c, ranks, witt: witts, sum_rank })
}

/// The group commutator obtained from the standard bracketing of a Lyndon word.
fn lyndon_commutator(w: &[u16], rank: usize) -> FreeWord {
    match standard_factorization(w) {
        None => FreeWord::from_letters(rank, [w[0] as i32 + 1]),
        Some((u, v)) => {
            FreeWord::commutator(&lyndon_commutator(u, rank), &lyndon_commutator(v, rank))
        }
    }
}

/// Weight-`c` commutators of `F_m`: standard bracketings of Lyndon words and
/// left-normed `[x_{a_1}, ..., x_{a_c}]` with `a_1 > a_2`.
pub fn free_basic_commutators(m: usize, c: usize) -> Vec<FreeWord> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let lyndon = lyndon_words(m, c).into_iter().map(|w| lyndon_commutator(&w, m));
    let left = commutator_indices(m, c).into_iter().map(|t| {
        let gens: Vec<FreeWord> =
            t.iter().map(|&a| FreeWord::from_letters(m, [a as i32 + 1])).collect();
        FreeWord::left_normed(&gens).expect("nonempty")
    });
    for g in lyndon.chain(left) {
        if seen.insert(g.letters().to_vec()) {
            out.push(g);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct InnerDegreeSample {
    pub word: String,
    pub gamma_degree: Option<usize>,
    pub ia_degree: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InnerDegreeReport {
    pub m: usize,
    pub c: usize,
    pub samples: Vec<InnerDegreeSample>,
}

impl InnerDegreeReport {
    /// Every sample lies in `γ_c ∖ γ_{c+1}` and its inner automorphism has
    /// IA degree exactly `c + 1`.
    pub fn passed(&self) -> bool {
        !self.samples.is_empty()
            && self
                .samples
                .iter()
                .all(|s| s.gamma_degree == Some(self.c) && s.ia_degree == Some(self.c + 1))
    }
}

/// IA degrees of the inner automorphisms `τ_g` for the weight-`c` commutators
/// of `F_m`.
pub fn inner_degree_check(m: usize, c: usize, maxdeg: usize) -> Result<InnerDegreeReport, Error> {
    if m == 0 {
        return Err(Error::ZeroRank);
    }
    check_truncation(c, maxdeg)?;
    let samples = free_basic_commutators(m, c)
        .par_iter()
        .map(|g| {
            let tau = EndoF::inner(g);
            Ok(InnerDegreeSample {
                word: g.to_string(),
                gamma_degree: gamma_degree(g, maxdeg).exact(),
                ia_degree: ia_degree(&tau, maxdeg)?.exact(),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(InnerDegreeReport { m, c, samples })
}

/// Certified lower bound `Σ_{i=2}^n witt(i, c) ≤ rank 𝓛^{c+1}(IA(F_n))`,
/// witnessed by the Johnson lattice of `γ_c(I_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankBound {
    pub lhs: u64,
    pub certified: bool,
}

pub fn lower_bound_certificate(n: usize, c: usize) -> Result<RankBound, Error> {
    let lhs = factor_witt_sum(n, c);
    let rank = l1_rank(n, c, c + 2)?;
    Ok(RankBound { lhs, certified: rank as u64 == lhs })
}

/// Whether `f ∈ I_{c+1}A` at truncation `maxdeg`.
pub fn in_filtration(f: &EndoF, c: usize, maxdeg: usize) -> Result<bool, Error> {
    Ok(match ia_degree(f, maxdeg)? {
        Depth::Exact(d) => d > c,
        Depth::AtLeast(_) | Depth::Identity => true,
    })
}
