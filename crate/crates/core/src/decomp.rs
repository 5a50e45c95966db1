//! The ideal `J` of the free Lie algebra `L` on the generators of `I_n`, and
//! exact lattice certificates for its decomposition.
//!
//! Letters are the generators `y(m,i)` in the order `y(2,1) < y(2,2) < y(3,1)
//! < ...`, so letter `generator_index(m, i)` of the Lie algebra is `y(m,i)`.
//! Graded pieces are handled as lattices in Lyndon coordinates; spans are
//! always carried by lattice bases, which is enough because the bracket is
//! bilinear.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::igroup::{
    defining_relations, generator_count, generator_index, Relation, RelationKind, YLetter,
};
use crate::lattice::Lattice;
use crate::lie::{bracket, lyndon_basis_on, witt, GradedLattice, LieElem, LyndonTable};
use crate::magnus::{gamma_degree, magnus_expand, Depth};
use crate::words::FreeWord;

/// The Lie letter of `y(m,i)`.
pub fn letter(m: usize, i: usize) -> usize {
    generator_index(m, i)
}

fn level_letters(level: usize) -> Vec<usize> {
    (1..=level).map(|i| letter(level, i)).collect()
}

/// Letters of `U_r = Y_r ⊕ ... ⊕ Y_n`.
fn upper_letters(n: usize, r: usize) -> Vec<usize> {
    (r..=n).flat_map(level_letters).collect()
}

/// The free Lie algebra on the generators of `I_n`, truncated at `maxdeg`,
/// with Lyndon tables for every degree up to the truncation.
pub struct Graded {
    n: usize,
    k: usize,
    maxdeg: usize,
    gens: Vec<LieElem>,
    tables: Vec<LyndonTable>,
}

impl Graded {
    pub fn new(n: usize, maxdeg: usize) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::Precondition(format!("n = {n}; need n >= 2")));
        }
        if maxdeg < 2 {
            return Err(Error::Precondition(format!("degree {maxdeg}; need at least 2")));
        }
        let k = generator_count(n);
        let gens = (0..k).map(|a| LieElem::generator(k, maxdeg, a)).collect::<Result<_, _>>()?;
        let tables = (1..=maxdeg).map(|d| LyndonTable::new(k, d)).collect::<Result<_, _>>()?;
        Ok(Graded { n, k, maxdeg, gens, tables })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of letters, `(n-1)(n+2)/2`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn maxdeg(&self) -> usize {
        self.maxdeg
    }

    pub fn y(&self, m: usize, i: usize) -> &LieElem {
        &self.gens[letter(m, i)]
    }

    pub fn table(&self, m: usize) -> &LyndonTable {
        &self.tables[m - 1]
    }

    pub fn lattice(&self, elems: &[LieElem], m: usize) -> Result<GradedLattice, Error> {
        self.table(m).lattice_of(elems)
    }

    /// Lie elements for the basis rows of a lattice.
    pub fn basis_elements(&self, l: &GradedLattice) -> Vec<LieElem> {
        let table = self.table(l.degree);
        l.lattice.basis_rows().iter().map(|r| table.from_coordinates(r, self.maxdeg)).collect()
    }

    /// `[A, S]` for a lattice `A` of degree `m` and elements `S` of degree `d`.
    fn bracket_span(
        &self,
        a: &GradedLattice,
        s: &[LieElem],
        d: usize,
    ) -> Result<GradedLattice, Error> {
        let base = self.basis_elements(a);
        let prods: Vec<LieElem> = base
            .par_iter()
            .flat_map_iter(|x| s.iter().map(move |t| bracket(x, t)))
            .collect::<Result<_, _>>()?;
        self.lattice(&prods, a.degree + d)
    }

    fn letters(&self, ls: &[usize]) -> Vec<LieElem> {
        ls.iter().map(|&a| self.gens[a].clone()).collect()
    }

    /// `L^m(Y_level)`.
    pub fn factor_piece(&self, level: usize, m: usize) -> Result<GradedLattice, Error> {
        let elems = lyndon_basis_on(self.k, &level_letters(level), m, self.maxdeg)?;
        self.lattice(&elems, m)
    }

    fn zero_lattice(&self, m: usize) -> GradedLattice {
        GradedLattice { degree: m, nletters: self.k, lattice: Lattice::new(self.table(m).len()) }
    }
}

/// One relator of the presentation, as a degree-2 Lie element.
#[derive(Debug, Clone)]
pub struct Relator {
    pub relation: Relation,
    pub elem: LieElem,
}

#[derive(Debug, Clone)]
pub struct RelatorSet {
    pub n: usize,
    pub relators: Vec<Relator>,
}

impl RelatorSet {
    pub fn len(&self) -> usize {
        self.relators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relators.is_empty()
    }

    /// Counts of relators of kinds (1), (2), (3).
    pub fn counts(&self) -> [usize; 3] {
        let mut out = [0; 3];
        for r in &self.relators {
            out[kind_index(r.relation.kind)] += 1;
        }
        out
    }

    pub fn elems(&self) -> Vec<LieElem> {
        self.relators.iter().map(|r| r.elem.clone()).collect()
    }

    /// The set with relator `index` removed.
    pub fn without(&self, index: usize) -> RelatorSet {
        let mut relators = self.relators.clone();
        relators.remove(index);
        RelatorSet { n: self.n, relators }
    }
}

fn kind_index(k: RelationKind) -> usize {
    match k {
        RelationKind::One => 0,
        RelationKind::Two => 1,
        RelationKind::Three => 2,
    }
}

/// The Lie relator: `[y(m,i), y(r,j)]`, minus `[y(m,i), y(m,j)]` for kind (3).
pub fn lie_relator(g: &Graded, rel: &Relation) -> Result<LieElem, Error> {
    let Relation { kind, m, r, i, j } = *rel;
    let head = bracket(g.y(m, i), g.y(r, j))?;
    Ok(match kind {
        RelationKind::One | RelationKind::Two => head,
        RelationKind::Three => head.sub(&bracket(g.y(m, i), g.y(m, j))?),
    })
}

pub fn build_relators(g: &Graded) -> Result<RelatorSet, Error> {
    let relators = defining_relations(g.n)
        .into_iter()
        .map(|relation| Ok(Relator { elem: lie_relator(g, &relation)?, relation }))
        .collect::<Result<_, Error>>()?;
    Ok(RelatorSet { n: g.n, relators })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PsiCase {
    /// `[y(μ,l), y(r,l)] ↦ itself`
    F1,
    /// `[y(μ,ν), y(r,l)] ↦ itself` for `ν > r`
    F2,
    /// `[y(μ,ν), y(r,l)] ↦ [y(μ,ν), y(r,l)] − [y(μ,ν), y(μ,l)]` for `ν ≤ r`, `ν ≠ l`
    F3,
}

#[derive(Debug, Clone)]
pub struct PsiImage {
    pub mu: usize,
    pub nu: usize,
    pub l: usize,
    pub case: PsiCase,
    pub image: LieElem,
}

/// `ψ_{2,r}` on the basis `[y(μ,ν), y(r,l)]` of `[U_{r+1}, Y_r]`.
#[derive(Debug, Clone)]
pub struct PsiMap {
    pub n: usize,
    pub r: usize,
    pub images: Vec<PsiImage>,
}

pub fn build_psi(g: &Graded, r: usize) -> Result<PsiMap, Error> {
    let n = g.n;
    if r < 2 || r + 1 > n {
        return Err(Error::Precondition(format!(
            "r = {r}; need 2 <= r <= {}",
            n.saturating_sub(1)
        )));
    }
    let mut images = Vec::new();
    for mu in r + 1..=n {
        for nu in 1..=mu {
            for l in 1..=r {
                let head = bracket(g.y(mu, nu), g.y(r, l))?;
                let (case, image) = if nu == l {
                    (PsiCase::F1, head)
                } else if nu > r {
                    (PsiCase::F2, head)
                } else {
                    (PsiCase::F3, head.sub(&bracket(g.y(mu, nu), g.y(mu, l))?))
                };
                images.push(PsiImage { mu, nu, l, case, image });
            }
        }
    }
    Ok(PsiMap { n, r, images })
}

impl PsiMap {
    /// Row `s` holds the coordinates of the projection of `ψ(b_s)` onto
    /// `[U_{r+1}, Y_r]` in the basis `b_t = [y(μ,ν), y(r,l)]`.
    pub fn block(&self, g: &Graded) -> Result<Vec<Vec<BigInt>>, Error> {
        let table = g.table(2);
        // b_t = −(standard bracketing of the Lyndon word y(r,l) y(μ,ν))
        let cols: Vec<u32> = self
            .images
            .iter()
            .map(|p| {
                let probe = bracket(g.y(self.r, p.l), g.y(p.mu, p.nu))?;
                Ok(table.coordinates(&probe)?[0].0)
            })
            .collect::<Result<_, Error>>()?;
        self.images
            .iter()
            .map(|p| {
                let coords = table.coordinates(&p.image)?;
                Ok(cols
                    .iter()
                    .map(|c| {
                        coords.iter().find(|(k, _)| k == c).map_or_else(BigInt::zero, |(_, x)| -x)
                    })
                    .collect())
            })
            .collect()
    }
}

/// Determinant by fraction-free elimination.
pub fn determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    if n == 0 {
        BigInt::one()
    } else {
        sign * &m[n - 1][n - 1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiReport {
    pub n: usize,
    pub r: usize,
    pub size: usize,
    pub block_determinant: String,
    /// The images are linearly independent in `L²`.
    pub injective: bool,
    /// The images are exactly the relators with this `r`.
    pub matches_relators: bool,
    /// The images span the same lattice as those relators.
    pub same_span: bool,
}

impl PsiReport {
    pub fn passed(&self) -> bool {
        self.block_determinant.trim_start_matches('-') == "1"
            && self.injective
            && self.matches_relators
            && self.same_span
    }
}

pub fn verify_psi(n: usize, r: usize) -> Result<PsiReport, Error> {
    let g = Graded::new(n, 2)?;
    let psi = build_psi(&g, r)?;
    let det = determinant(psi.block(&g)?);
    let images: Vec<LieElem> = psi.images.iter().map(|p| p.image.clone()).collect();
    let span = g.lattice(&images, 2)?;
    let rels = build_relators(&g)?;
    let mine: Vec<&Relator> = rels.relators.iter().filter(|x| x.relation.r == r).collect();
    let matches_relators = mine.len() == images.len()
        && psi.images.iter().all(|p| {
            mine.iter().any(|x| {
                x.relation.m == p.mu
                    && x.relation.i == p.nu
                    && x.relation.j == p.l
                    && x.elem == p.image
            })
        });
    let rel_elems: Vec<LieElem> = mine.iter().map(|x| x.elem.clone()).collect();
    let same_span = crate::lie::lattice_equal(&span, &g.lattice(&rel_elems, 2)?);
    Ok(PsiReport {
        n,
        r,
        size: images.len(),
        block_determinant: det.to_string(),
        injective: span.rank() == images.len(),
        matches_relators,
        same_span,
    })
}

/// `J^2, ..., J^max_m` for the ideal generated by `relators`.
pub fn ideal_pieces(
    g: &Graded,
    relators: &RelatorSet,
    max_m: usize,
) -> Result<Vec<GradedLattice>, Error> {
    let mut out = vec![g.lattice(&relators.elems(), 2)?];
    for m in 3..=max_m.min(g.maxdeg) {
        let prev = out.last().expect("J^2 is present");
        out.push(g.bracket_span(prev, &g.gens, 1)?);
        debug_assert_eq!(out.last().unwrap().degree, m);
    }
    Ok(out)
}

/// `J^m` for the relators of `I_n`.
pub fn ideal_graded_piece(n: usize, m: usize) -> Result<GradedLattice, Error> {
    let g = Graded::new(n, m)?;
    let rels = build_relators(&g)?;
    Ok(ideal_pieces(&g, &rels, m)?.pop().expect("m >= 2"))
}

/// `T_r^2, ..., T_r^max_m`, the graded pieces of the free Lie algebra on
/// `𝓒_(r) = ⋃ [ψ_{2,r}([𝓤_{r+1}, 𝓨_r]), _a 𝓨_r, _b 𝓤_{r+1}]`.
pub fn t_pieces(g: &Graded, r: usize, max_m: usize) -> Result<Vec<GradedLattice>, Error> {
    let psi = build_psi(g, r)?;
    let images: Vec<LieElem> = psi.images.iter().map(|p| p.image.clone()).collect();
    let y_r = g.letters(&level_letters(r));
    let u = g.letters(&upper_letters(g.n, r + 1));
    let max_m = max_m.min(g.maxdeg);
    // a[κ]: tails from 𝓨_r only; c[κ]: span of 𝓒_(r),κ
    let mut a = vec![g.zero_lattice(2), g.zero_lattice(2), g.lattice(&images, 2)?];
    let mut c = a.clone();
    for kappa in 3..=max_m {
        let ak = g.bracket_span(&a[kappa - 1], &y_r, 1)?;
        let mut ck = g.bracket_span(&c[kappa - 1], &u, 1)?;
        for row in ak.lattice.basis_rows() {
            ck.lattice.insert_big(row);
        }
        a.push(ak);
        c.push(ck);
    }
    // left-normed brackets of elements of 𝓒_(r)
    let mut s: Vec<GradedLattice> = vec![g.zero_lattice(2), g.zero_lattice(2)];
    for m in 2..=max_m {
        let mut sm = c[m].clone();
        for d in 2..=m.saturating_sub(2) {
            let head = &s[m - d];
            let tail = g.basis_elements(&c[d]);
            for row in g.bracket_span(head, &tail, d)?.lattice.basis_rows() {
                sm.lattice.insert_big(row);
            }
        }
        s.push(sm);
    }
    Ok(s.split_off(2))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectSumDegree {
    pub m: usize,
    pub rank_total: u64,
    #[serde(rename = "rank_J")]
    pub rank_j: usize,
    #[serde(rename = "ranks_Y")]
    pub ranks_y: Vec<usize>,
    pub direct_sum: bool,
    pub snf_ones: bool,
    /// `rank_total` minus the rank of the sum of all parts.
    pub deficit: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectSumReport {
    pub n: usize,
    pub per_degree: Vec<DirectSumDegree>,
}

impl DirectSumReport {
    pub fn passed(&self) -> bool {
        self.per_degree.iter().all(|d| d.direct_sum && d.snf_ones && d.deficit == 0)
    }
}

/// Checks `L^m = (⊕_i L^m(Y_i)) ⊕ J^m` over `Z` for `2 ≤ m ≤ max_m`.
pub fn verify_direct_sum(n: usize, max_m: usize) -> Result<DirectSumReport, Error> {
    let g = Graded::new(n, max_m)?;
    let rels = build_relators(&g)?;
    verify_direct_sum_with(&g, &rels, max_m)
}

/// As [`verify_direct_sum`] with an arbitrary relator set.
pub fn verify_direct_sum_with(
    g: &Graded,
    relators: &RelatorSet,
    max_m: usize,
) -> Result<DirectSumReport, Error> {
    let pieces = ideal_pieces(g, relators, max_m)?;
    let mut per_degree = Vec::new();
    for (idx, jm) in pieces.into_iter().enumerate() {
        let m = idx + 2;
        let mut parts = (2..=g.n).map(|i| g.factor_piece(i, m)).collect::<Result<Vec<_>, _>>()?;
        let ranks_y = parts.iter().map(GradedLattice::rank).collect();
        let rank_j = jm.rank();
        parts.push(jm);
        let rep = crate::lie::lattice_direct_sum_is_whole(&parts, m)?;
        per_degree.push(DirectSumDegree {
            m,
            rank_total: rep.witt,
            rank_j,
            ranks_y,
            direct_sum: rep.sum_rank == rep.rank_sum,
            snf_ones: rep.snf_ones,
            deficit: rep.witt - rep.sum_rank as u64,
        });
    }
    Ok(DirectSumReport { n: g.n, per_degree })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TSumDegree {
    pub m: usize,
    /// `rank T_r^m` for `r = 2, ..., n-1`.
    pub ranks_t: Vec<usize>,
    pub rank_j: usize,
    pub direct: bool,
    pub equal_to_j: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TSumReport {
    pub n: usize,
    pub per_degree: Vec<TSumDegree>,
}

impl TSumReport {
    pub fn passed(&self) -> bool {
        self.per_degree.iter().all(|d| d.direct && d.equal_to_j)
    }
}

/// Checks `J^m = ⊕_{r=2}^{n-1} T_r^m` as lattices for `2 ≤ m ≤ max_m`.
pub fn verify_t_sum(n: usize, max_m: usize) -> Result<TSumReport, Error> {
    let g = Graded::new(n, max_m)?;
    let rels = build_relators(&g)?;
    let j = ideal_pieces(&g, &rels, max_m)?;
    let ts: Vec<Vec<GradedLattice>> =
        (2..n).map(|r| t_pieces(&g, r, max_m)).collect::<Result<_, _>>()?;
    let mut per_degree = Vec::new();
    for (idx, jm) in j.iter().enumerate() {
        let m = idx + 2;
        let mut sum = g.zero_lattice(m);
        let mut ranks_t = Vec::new();
        for t in &ts {
            ranks_t.push(t[idx].rank());
            for row in t[idx].lattice.basis_rows() {
                sum.lattice.insert_big(row);
            }
        }
        per_degree.push(TSumDegree {
            m,
            direct: sum.rank() == ranks_t.iter().sum::<usize>(),
            equal_to_j: crate::lie::lattice_equal(&sum, jm),
            ranks_t,
            rank_j: jm.rank(),
        });
    }
    Ok(TSumReport { n, per_degree })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrRankRow {
    pub c: usize,
    pub witt_k: u64,
    pub rank_j: usize,
    /// `witt(k, c) − rank J^c`.
    pub quotient: u64,
    /// `Σ_{i=2}^n witt(i, c)`.
    pub factor_sum: u64,
}

impl GrRankRow {
    pub fn agrees(&self) -> bool {
        self.quotient == self.factor_sum
    }
}

/// Ranks of `gr_c(I_n)` from the quotient `L/J` against the factor sum.
pub fn gr_rank_table(n: usize, max_c: usize) -> Result<Vec<GrRankRow>, Error> {
    let g = Graded::new(n, max_c.max(2))?;
    let rels = build_relators(&g)?;
    let j = ideal_pieces(&g, &rels, max_c)?;
    let k = g.k as u64;
    Ok((1..=max_c)
        .map(|c| {
            let rank_j = if c == 1 { 0 } else { j[c - 2].rank() };
            let witt_k = witt(k, c as u64);
            GrRankRow {
                c,
                witt_k,
                rank_j,
                quotient: witt_k - rank_j as u64,
                factor_sum: (2..=n as u64).map(|i| witt(i, c as u64)).sum(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealCheck {
    /// `J` or `T~` (the sum of the `T_r`).
    pub ideal: String,
    pub m: usize,
    pub d: usize,
    pub contained: bool,
}

/// `[J^m, L^d] ⊆ J^{m+d}` and `[T~^m, L^1] ⊆ T~^{m+1}` for `m + d ≤ max_m`.
pub fn verify_ideal_property(n: usize, max_m: usize) -> Result<Vec<IdealCheck>, Error> {
    let g = Graded::new(n, max_m)?;
    let rels = build_relators(&g)?;
    let j = ideal_pieces(&g, &rels, max_m)?;
    let mut out = Vec::new();
    for m in 2..max_m {
        for d in 1..=max_m - m {
            let ld = crate::lie::lyndon_basis_on(g.k, &(0..g.k).collect::<Vec<_>>(), d, g.maxdeg)?;
            let prod = g.bracket_span(&j[m - 2], &ld, d)?;
            out.push(IdealCheck {
                ideal: "J".into(),
                m,
                d,
                contained: j[m + d - 2].lattice.contains_lattice(&prod.lattice),
            });
        }
    }
    let ts: Vec<Vec<GradedLattice>> =
        (2..n).map(|r| t_pieces(&g, r, max_m)).collect::<Result<_, _>>()?;
    let tilde: Vec<GradedLattice> = (2..=max_m)
        .map(|m| {
            let mut sum = g.zero_lattice(m);
            for t in &ts {
                for row in t[m - 2].lattice.basis_rows() {
                    sum.lattice.insert_big(row);
                }
            }
            sum
        })
        .collect();
    for m in 2..max_m {
        let prod = g.bracket_span(&tilde[m - 2], &g.gens, 1)?;
        out.push(IdealCheck {
            ideal: "T~".into(),
            m,
            d: 1,
            contained: tilde[m - 1].lattice.contains_lattice(&prod.lattice),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PresentationReport {
    pub n: usize,
    pub relators_in_j2: bool,
    /// `{[y(i,a), y(i,b)] : a > b}` has `Σ witt(i, 2)` elements and together
    /// with `J²` gives a `Z`-basis of `L²`.
    pub vstar_complements: bool,
}

impl PresentationReport {
    pub fn passed(&self) -> bool {
        self.relators_in_j2 && self.vstar_complements
    }
}

pub fn verify_presentation(n: usize) -> Result<PresentationReport, Error> {
    let g = Graded::new(n, 2)?;
    let rels = build_relators(&g)?;
    let j2 = g.lattice(&rels.elems(), 2)?;
    let table = g.table(2);
    let relators_in_j2 = rels
        .relators
        .iter()
        .map(|r| table.coordinates(&r.elem))
        .collect::<Result<Vec<_>, _>>()?
        .iter()
        .all(|row| j2.lattice.contains_big(row));
    let mut vstar = Vec::new();
    for i in 2..=n {
        for a in 1..=i {
            for b in 1..a {
                vstar.push(bracket(g.y(i, a), g.y(i, b))?);
            }
        }
    }
    let expected: u64 = (2..=n as u64).map(|i| witt(i, 2)).sum();
    let vs = g.lattice(&vstar, 2)?;
    let rep = crate::lie::lattice_direct_sum_is_whole(&[vs, j2], 2)?;
    Ok(PresentationReport {
        n,
        relators_in_j2,
        vstar_complements: vstar.len() as u64 == expected && rep.passed(),
    })
}

/// A generator word as a word in the free group on the Lie letters.
pub fn yword_to_free(n: usize, w: &[YLetter]) -> FreeWord {
    let letters = w.iter().map(|l| l.sign * (letter(l.m, l.i) as i32 + 1)).collect();
    FreeWord::new(generator_count(n), letters).expect("valid generator letters")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelatorMagnusReport {
    pub n: usize,
    pub checked: usize,
    pub failures: Vec<String>,
}

/// Each group relator lies in `γ_2 \ γ_3` and its degree-2 Magnus part is the
/// corresponding Lie relator, which fixes the sign convention of kind (3).
pub fn verify_relator_magnus(n: usize) -> Result<RelatorMagnusReport, Error> {
    let g = Graded::new(n, 2)?;
    let rels = build_relators(&g)?;
    let mut failures = Vec::new();
    for r in &rels.relators {
        let w = yword_to_free(n, &r.relation.relator());
        let depth = gamma_degree(&w, 3);
        let lead = magnus_expand(&w, 2).homogeneous_part(2);
        if depth != Depth::Exact(2) || &lead != r.elem.coords() {
            failures.push(format!("{}: depth {depth}", r.relation));
        }
    }
    Ok(RelatorMagnusReport { n, checked: rels.len(), failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relator_counts() {
        let g = Graded::new(3, 2).unwrap();
        let rels = build_relators(&g).unwrap();
        assert_eq!(rels.counts(), [2, 2, 2]);
        // brute force over all index tuples against the side conditions
        let mut brute = 0;
        for m in 2..=4usize {
            for r in 2..m {
                for i in 1..=m {
                    for j in 1..=r {
                        let one = i == j;
                        let two = r < i;
                        let three = i <= r && i != j;
                        brute += usize::from(one) + usize::from(two) + usize::from(three);
                    }
                }
            }
        }
        let g4 = Graded::new(4, 2).unwrap();
        assert_eq!(build_relators(&g4).unwrap().len(), brute);
        assert!(build_relators(&Graded::new(2, 2).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn relator_span_rank() {
        assert_eq!(ideal_graded_piece(3, 2).unwrap().rank(), 6);
        assert_eq!(ideal_graded_piece(4, 2).unwrap().rank(), 26);
    }

    #[test]
    fn ideal_rank_n3_m3() {
        assert_eq!(ideal_graded_piece(3, 3).unwrap().rank(), 30);
    }

    #[test]
    fn psi_cases() {
        let g = Graded::new(3, 2).unwrap();
        let psi = build_psi(&g, 2).unwrap();
        let find =
            |mu, nu, l| psi.images.iter().find(|p| (p.mu, p.nu, p.l) == (mu, nu, l)).unwrap();
        let p = find(3, 1, 1);
        assert_eq!(p.case, PsiCase::F1);
        assert_eq!(p.image, bracket(g.y(3, 1), g.y(2, 1)).unwrap());
        let p = find(3, 3, 1);
        assert_eq!(p.case, PsiCase::F2);
        assert_eq!(p.image, bracket(g.y(3, 3), g.y(2, 1)).unwrap());
        let p = find(3, 1, 2);
        assert_eq!(p.case, PsiCase::F3);
        let expect =
            bracket(g.y(3, 1), g.y(2, 2)).unwrap().sub(&bracket(g.y(3, 1), g.y(3, 2)).unwrap());
        assert_eq!(p.image, expect);
        assert!(build_psi(&g, 3).is_err());
    }

    #[test]
    fn psi_block_is_identity() {
        for (n, r) in [(3, 2), (4, 2), (4, 3)] {
            let g = Graded::new(n, 2).unwrap();
            let psi = build_psi(&g, r).unwrap();
            let block = psi.block(&g).unwrap();
            for (s, row) in block.iter().enumerate() {
                for (t, x) in row.iter().enumerate() {
                    assert_eq!(x, &BigInt::from(i64::from(s == t)), "n={n} r={r}");
                }
            }
            assert!(verify_psi(n, r).unwrap().passed());
        }
    }

    #[test]
    fn determinant_small() {
        let m = |v: Vec<Vec<i64>>| {
            v.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect()
        };
        assert_eq!(determinant(m(vec![vec![2, 1], vec![7, 4]])), BigInt::from(1));
        assert_eq!(
            determinant(m(vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 3]])),
            BigInt::from(-3)
        );
        assert_eq!(determinant(m(vec![vec![1, 2], vec![2, 4]])), BigInt::from(0));
    }

    #[test]
    fn t_ranks_n4() {
        let rep = verify_t_sum(4, 2).unwrap();
        assert_eq!(rep.per_degree[0].ranks_t, vec![14, 12]);
        assert!(rep.passed());
    }

    #[test]
    fn gr_ranks_n3() {
        let rows = gr_rank_table(3, 3).unwrap();
        let q: Vec<u64> = rows.iter().map(|r| r.quotient).collect();
        assert_eq!(q, vec![5, 4, 10]);
        assert!(rows.iter().all(GrRankRow::agrees));
    }

    #[test]
    fn dropping_a_kind_three_relator_leaves_deficit_one() {
        let g = Graded::new(3, 2).unwrap();
        let rels = build_relators(&g).unwrap();
        let idx =
            rels.relators.iter().position(|r| r.relation.kind == RelationKind::Three).unwrap();
        let rep = verify_direct_sum_with(&g, &rels.without(idx), 2).unwrap();
        assert!(!rep.passed());
        assert_eq!(rep.per_degree[0].deficit, 1);
    }

    #[test]
    fn presentation_and_magnus_signs() {
        for n in 3..=4 {
            assert!(verify_presentation(n).unwrap().passed());
            let rep = verify_relator_magnus(n).unwrap();
            assert!(rep.failures.is_empty(), "{:?}", rep.failures);
        }
    }

    #[test]
    fn ideal_property_small() {
        let checks = verify_ideal_property(3, 4).unwrap();
        assert!(checks.iter().all(|c| c.contained), "{checks:?}");
        assert!(checks.iter().any(|c| c.d == 2));
    }
}
