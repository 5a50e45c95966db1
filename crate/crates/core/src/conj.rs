//! Conjugacy in `I_n`, solved one level of the normal form at a time.
//!
//! Writing `x = w_n ... w_2`, `y = z_n ... z_2` and `g = g_n ... g_2`, the
//! equation `g x g⁻¹ = y` splits into one equation per level. Level 2 is
//! ordinary conjugacy `g_2 w_2 g_2⁻¹ = z_2` in `F_2`. Once `g_{<i}` solves the
//! levels below `i`, level `i` is the twisted conjugacy problem
//! `g_i a_i φ(g_i)⁻¹ = z_i` in `H_i ≅ F_i`, where `a_i = g_{<i} w_i g_{<i}⁻¹`
//! and `φ` is conjugation by `z_{i-1} ... z_2`.
//!
//! Solutions at one level are enumerated lazily and the search backtracks
//! when a higher level has no solution. Every `Conjugate` verdict carries a
//! witness that has been checked by multiplication, and `NotConjugate` is
//! only returned together with an invariant that separates the classes.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::endos::EndoF;
use crate::error::Error;
use crate::igroup::{generators, render_factor_word, IElem, YLetter};
use crate::lattice::Lattice;
use crate::words::{FreeWord, Letter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    /// Longest conjugator explored by word searches.
    pub len: usize,
    /// Largest power of a centralizer root tried when walking a coset.
    pub coset: usize,
    /// Highest degree used by the finite-quotient obstruction.
    pub nilpotency: usize,
    /// Cap on the number of words visited by one call.
    pub nodes: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { len: 16, coset: 8, nilpotency: 4, nodes: 400_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Refutation {
    /// Exponent-sum vectors differ; conjugation acts trivially on `I_n/I_n'`.
    Abelianization { x: Vec<i64>, y: Vec<i64> },
    /// The level-2 components are not conjugate in `F_2`.
    LevelTwoCore { w2: String, z2: String },
    /// Cyclic cores differ, so no conjugator exists (identity twist).
    CyclicCores,
    /// `ab(z) − ab(a)` lies outside the image of `1 − φ` on `Z^rank`.
    TwistedAbelianization,
    /// The twisted orbit in a finite mod-p quotient of the Magnus image misses `z`.
    FiniteQuotient { p: u32, degree: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelTrace {
    pub level: usize,
    /// `a_i`, the level component of `g_{<i} x g_{<i}⁻¹`.
    pub a: String,
    /// `b_i = g_{<i} x_{<i} g_{<i}⁻¹`, equal to `y_{<i}` on a solved branch.
    pub b: String,
    /// The twist, as the element of `I_{i-1}` whose conjugation action it is.
    pub twist: String,
    /// How the level solution was chosen.
    pub parameter: String,
    pub g: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Conjugate { witness: String },
    NotConjugate { reason: Refutation },
    Unknown { bounds: SearchBudget, nodes_used: usize },
}

#[derive(Debug, Clone)]
pub struct ConjResult {
    pub verdict: Verdict,
    /// The verified conjugator when the verdict is `Conjugate`.
    pub witness: Option<IElem>,
    pub levels: Vec<LevelTrace>,
}

impl ConjResult {
    pub fn is_conjugate(&self) -> bool {
        matches!(self.verdict, Verdict::Conjugate { .. })
    }

    pub fn is_not_conjugate(&self) -> bool {
        matches!(self.verdict, Verdict::NotConjugate { .. })
    }

    /// The verdict object extended with the witness components and the trace.
    pub fn to_json(&self) -> serde_json::Value {
        let mut out = serde_json::to_value(&self.verdict).expect("verdict serializes");
        let obj = out.as_object_mut().expect("tagged enum is an object");
        obj.insert(
            "witness_components".into(),
            serde_json::to_value(self.witness.as_ref().map(IElem::component_strings))
                .expect("strings serialize"),
        );
        obj.insert("levels".into(), serde_json::to_value(&self.levels).expect("trace serializes"));
        out
    }
}

/// One level of the rewriting of `g x g⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeelLevel {
    pub level: usize,
    pub a: FreeWord,
    pub b: IElem,
    /// `g_i a_i b_i g_i⁻¹ b_i⁻¹`, the level component of `g x g⁻¹`.
    pub term: FreeWord,
}

/// Rewrites `g x g⁻¹` level by level, from `n` down to 2.
pub fn peel(x: &IElem, g: &IElem) -> Result<Vec<PeelLevel>, Error> {
    if x.n() != g.n() {
        return Err(Error::RankMismatch { left: x.n(), right: g.n() });
    }
    let mut out = Vec::new();
    for level in (2..=x.n()).rev() {
        let gl = g.below(level);
        let a = gl.lower_action(level).apply(x.component(level))?;
        let b = gl.imul(&x.below(level))?.imul(&gl.iinv())?;
        let gi = g.component(level);
        let term = gi.concat(&a).concat(&b.lower_action(level).apply(&gi.invert())?);
        out.push(PeelLevel { level, a, b, term });
    }
    Ok(out)
}

/// Images `φ(s)` and `φ(s)⁻¹` for every signed letter `s`.
struct TwistTable {
    rank: usize,
    identity: bool,
    /// Indexed by `letter + rank`.
    inv_images: Vec<FreeWord>,
}

impl TwistTable {
    fn new(phi: &EndoF) -> Self {
        let rank = phi.rank();
        let mut inv_images = vec![FreeWord::identity(rank); 2 * rank + 1];
        for k in 1..=rank {
            let img = phi.image(k);
            inv_images[rank + k] = img.invert();
            inv_images[rank - k] = img.clone();
        }
        TwistTable { rank, identity: phi.is_identity(), inv_images }
    }

    /// `s · t · φ(s)⁻¹`.
    fn step(&self, s: Letter, t: &FreeWord) -> FreeWord {
        t.prepend_letter(s).concat(&self.inv_images[(s + self.rank as Letter) as usize])
    }

    fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (1..=self.rank as Letter).flat_map(|k| [k, -k])
    }
}

/// Node accounting shared by everything a single call explores.
struct Meter {
    used: usize,
    cap: usize,
}

impl Meter {
    fn take(&mut self, k: usize) -> bool {
        self.used += k;
        self.used <= self.cap
    }

    fn exhausted(&self) -> bool {
        self.used > self.cap
    }
}

/// Greedy twisted reduction: returns `(t*, q)` with `t* = q t φ(q)⁻¹` and no
/// single letter shortening `t*` further.
fn twisted_reduce(t: &FreeWord, tw: &TwistTable, meter: &mut Meter) -> (FreeWord, FreeWord) {
    let mut cur = t.clone();
    let mut q = FreeWord::identity(tw.rank);
    loop {
        if !meter.take(2 * tw.rank) {
            return (cur, q);
        }
        let best = tw
            .letters()
            .map(|s| (tw.step(s, &cur), s))
            .min_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.1.cmp(&b.1)));
        match best {
            Some((next, s)) if next.len() < cur.len() => {
                cur = next;
                q = q.prepend_letter(s);
            }
            _ => return (cur, q),
        }
    }
}

/// All reduced words `h` with `|h| ≤ depth`, built by prepending letters,
/// paired with `h · t · φ(h)⁻¹`.
fn twisted_ball(
    t: &FreeWord,
    depth: usize,
    tw: &TwistTable,
    meter: &mut Meter,
) -> Option<Vec<(FreeWord, FreeWord)>> {
    let mut out = vec![(FreeWord::identity(tw.rank), t.clone())];
    let mut frontier = 0;
    for _ in 0..depth {
        let end = out.len();
        for idx in frontier..end {
            let (h, v) = out[idx].clone();
            for s in tw.letters() {
                if h.letters().first() == Some(&-s) {
                    continue;
                }
                if !meter.take(1) {
                    return None;
                }
                out.push((h.prepend_letter(s), tw.step(s, &v)));
            }
        }
        frontier = end;
    }
    Some(out)
}

/// Solutions `h` of `h a φ(h)⁻¹ = z` found by meeting in the middle between
/// balls of radius `fwd` around `a` and `bwd` around `z`. Sorted shortest first.
fn twisted_meet(
    a: &FreeWord,
    z: &FreeWord,
    fwd: usize,
    bwd: usize,
    tw: &TwistTable,
    meter: &mut Meter,
) -> Option<Vec<FreeWord>> {
    let forward = twisted_ball(a, fwd, tw, meter)?;
    let mut index: HashMap<&FreeWord, Vec<&FreeWord>> = HashMap::new();
    for (h, v) in &forward {
        index.entry(v).or_default().push(h);
    }
    // p⁻¹ z φ(p) is the twisted conjugate of z by p⁻¹
    let backward = twisted_ball(z, bwd, tw, meter)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (pinv, v) in &backward {
        if let Some(hs) = index.get(v) {
            let p = pinv.invert();
            for h in hs {
                let sol = p.concat(h);
                if seen.insert(sol.clone()) {
                    out.push(sol);
                }
            }
        }
    }
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    Some(out)
}

/// Solutions of the twisted equation whose residual (after greedy reduction of
/// both sides) has length at most `depth`.
fn twisted_solutions(
    a: &FreeWord,
    z: &FreeWord,
    tw: &TwistTable,
    depth: usize,
    meter: &mut Meter,
) -> Option<Vec<FreeWord>> {
    let (ra, q) = twisted_reduce(a, tw, meter);
    let (rz, p) = twisted_reduce(z, tw, meter);
    let fwd = depth.div_ceil(2);
    let sols = twisted_meet(&ra, &rz, fwd, depth - fwd, tw, meter)?;
    let pinv = p.invert();
    Some(sols.iter().map(|h| pinv.concat(h).concat(&q)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwistedOutcome {
    Found(FreeWord),
    Refuted(Refutation),
    Unknown,
}

/// Decides, where it can, whether some `h` satisfies `h · a · twist(h)⁻¹ = z`.
pub fn twisted_conjugate(
    a: &FreeWord,
    z: &FreeWord,
    twist: &EndoF,
    budget: &SearchBudget,
) -> Result<TwistedOutcome, Error> {
    let rank = twist.rank();
    for r in [a.rank(), z.rank()] {
        if r != rank {
            return Err(Error::RankMismatch { left: rank, right: r });
        }
    }
    if !twist.has_inverse() {
        return Err(Error::NotInvertible);
    }
    let found = |h: FreeWord| {
        let check = h.concat(a).concat(&twist.apply_raw(&h).invert());
        assert_eq!(&check, z, "twisted witness failed verification");
        TwistedOutcome::Found(h)
    };
    if !twisted_abelian_solvable(a, z, twist) {
        return Ok(TwistedOutcome::Refuted(Refutation::TwistedAbelianization));
    }
    if twist.is_identity() {
        return Ok(match FreeWord::free_conjugate(a, z)? {
            Some(h) => found(h),
            None => TwistedOutcome::Refuted(Refutation::CyclicCores),
        });
    }
    let tw = TwistTable::new(twist);
    let mut meter = Meter { used: 0, cap: budget.nodes };
    for depth in 0..=budget.len {
        match twisted_solutions(a, z, &tw, depth, &mut meter) {
            Some(sols) => {
                if let Some(h) = sols.into_iter().next() {
                    return Ok(found(h));
                }
            }
            None => break,
        }
    }
    for p in [2u32, 3] {
        for degree in 1..=budget.nilpotency {
            match modp::orbit_separates(a, z, twist, p, degree) {
                Some(true) => {
                    return Ok(TwistedOutcome::Refuted(Refutation::FiniteQuotient { p, degree }))
                }
                Some(false) => {}
                None => break,
            }
        }
    }
    Ok(TwistedOutcome::Unknown)
}

/// Whether `ab(z) − ab(a)` lies in the image of `1 − φ̄` over `Z`.
fn twisted_abelian_solvable(a: &FreeWord, z: &FreeWord, twist: &EndoF) -> bool {
    let rank = twist.rank();
    let mut lattice = Lattice::new(rank);
    for k in 1..=rank {
        let mut col = twist.image(k).exponent_sums();
        for v in col.iter_mut() {
            *v = -*v;
        }
        col[k - 1] += 1;
        lattice.insert_dense(&col);
    }
    let (ea, ez) = (a.exponent_sums(), z.exponent_sums());
    let d: Vec<i64> = ez.iter().zip(&ea).map(|(p, q)| p - q).collect();
    lattice.contains_dense(&d)
}

mod modp {
    //! Twisted orbits in `F / D`, where `D` is the kernel of the Magnus map to
    //! `(Z/p)⟨X⟩` truncated above a fixed degree. `D` is fully invariant, so
    //! any automorphism descends to the finite quotient and an orbit that
    //! misses `z` there proves that no twisted conjugator exists.

    use std::collections::{HashSet, VecDeque};

    use super::EndoF;
    use crate::words::FreeWord;

    const ORBIT_CAP: usize = 20_000;
    const MONOMIAL_CAP: usize = 200;

    struct Ring {
        p: u16,
        rank: usize,
        degree: usize,
        /// `offset[d]` is the index of the first monomial of degree `d`.
        offset: Vec<usize>,
        size: usize,
    }

    type Elem = Vec<u16>;

    impl Ring {
        fn new(p: u16, rank: usize, degree: usize) -> Option<Ring> {
            let mut offset = vec![0];
            let mut size = 0usize;
            for d in 0..=degree {
                size = size.checked_add(rank.checked_pow(d as u32)?)?;
                offset.push(size);
            }
            (size <= MONOMIAL_CAP).then_some(Ring { p, rank, degree, offset, size })
        }

        fn one(&self) -> Elem {
            let mut e = vec![0; self.size];
            e[0] = 1;
            e
        }

        fn mul(&self, a: &Elem, b: &Elem) -> Elem {
            let mut out = vec![0u32; self.size];
            let p = self.p as u32;
            for da in 0..=self.degree {
                for (ia, &ca) in a[self.offset[da]..self.offset[da + 1]].iter().enumerate() {
                    if ca == 0 {
                        continue;
                    }
                    for db in 0..=self.degree - da {
                        let scale = self.rank.pow(db as u32);
                        let base = self.offset[da + db] + ia * scale;
                        for (ib, &cb) in b[self.offset[db]..self.offset[db + 1]].iter().enumerate()
                        {
                            if cb != 0 {
                                let slot = &mut out[base + ib];
                                *slot = (*slot + ca as u32 * cb as u32) % p;
                            }
                        }
                    }
                }
            }
            out.into_iter().map(|c| c as u16).collect()
        }

        /// Image of a single letter.
        fn letter(&self, x: i32) -> Elem {
            let v = x.unsigned_abs() as usize - 1;
            let mut e = self.one();
            let mut idx = 0;
            let mut sign = 1i64;
            for d in 1..=self.degree {
                idx = idx * self.rank + v;
                if x < 0 {
                    sign = -sign;
                }
                e[self.offset[d] + idx] = sign.rem_euclid(self.p as i64) as u16;
                if x > 0 {
                    break;
                }
            }
            e
        }

        fn word(&self, w: &FreeWord) -> Elem {
            w.letters().iter().fold(self.one(), |acc, &x| self.mul(&acc, &self.letter(x)))
        }
    }

    /// `Some(true)` if the orbit of `a` is fully enumerated and misses `z`;
    /// `Some(false)` if `z` is reached or the quotient is too small to help;
    /// `None` when the quotient or orbit is too large to enumerate.
    pub(super) fn orbit_separates(
        a: &FreeWord,
        z: &FreeWord,
        twist: &EndoF,
        p: u32,
        degree: usize,
    ) -> Option<bool> {
        let ring = Ring::new(p as u16, twist.rank(), degree)?;
        let rank = twist.rank() as i32;
        let moves: Vec<(Elem, Elem)> = (1..=rank)
            .flat_map(|k| [k, -k])
            .map(|s| {
                let sw = FreeWord::from_letters(twist.rank(), [s]);
                (ring.word(&sw), ring.word(&twist.apply_raw(&sw).invert()))
            })
            .collect();
        let start = ring.word(a);
        let target = ring.word(z);
        let mut seen = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            if t == target {
                return Some(false);
            }
            for (l, r) in &moves {
                let next = ring.mul(&ring.mul(l, &t), r);
                if seen.insert(next.clone()) {
                    if seen.len() > ORBIT_CAP {
                        return None;
                    }
                    queue.push_back(next);
                }
            }
        }
        Some(true)
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        #[test]
        fn inverse_letter_image_is_a_unit() {
            let ring = Ring::new(3, 2, 3).unwrap();
            let w = FreeWord::from_letters(2, [1, -1]);
            assert_eq!(ring.word(&w), ring.one());
            let w = FreeWord::from_letters(2, [-2, 1, 2, -1]);
            let inv = w.invert();
            assert_eq!(ring.mul(&ring.word(&w), &ring.word(&inv)), ring.one());
        }
    }
}

/// Everything fixed for one run of the level ladder.
struct Ladder<'a> {
    x: &'a IElem,
    y: &'a IElem,
    budget: SearchBudget,
    /// `twists[i]` is the twist table for level `i`.
    twists: Vec<Option<TwistTable>>,
    meter: Meter,
}

struct Candidate {
    h: FreeWord,
    cost: usize,
    parameter: String,
}

impl Ladder<'_> {
    /// Level-`i` solutions of cost at most `allowance`, in search order.
    fn candidates(&mut self, level: usize, a: &FreeWord, allowance: usize) -> Vec<Candidate> {
        let z = self.y.component(level);
        let tw = self.twists[level].as_ref().expect("levels 2..=n have twists");
        if tw.identity {
            if a.is_identity() && z.is_identity() {
                return all_words(level, allowance, &mut self.meter)
                    .into_iter()
                    .map(|h| Candidate {
                        cost: h.len(),
                        parameter: format!("free choice of length {}", h.len()),
                        h,
                    })
                    .collect();
            }
            let Some(h0) = FreeWord::free_conjugate(a, z).expect("same rank") else {
                return Vec::new();
            };
            let (root, _) = z.root();
            let kmax = self.budget.coset.min(allowance) as i64;
            return std::iter::once(0)
                .chain((1..=kmax).flat_map(|k| [k, -k]))
                .map(|k| Candidate {
                    h: root.pow(k).concat(&h0),
                    cost: k.unsigned_abs() as usize,
                    parameter: format!("centralizer coset k = {k}"),
                })
                .collect();
        }
        let depth = allowance.min(self.budget.len);
        let Some(sols) = twisted_solutions(a, z, tw, depth, &mut self.meter) else {
            return Vec::new();
        };
        sols.into_iter()
            .map(|h| Candidate {
                cost: 0,
                parameter: format!("twisted solution of length {}", h.len()),
                h,
            })
            .collect()
    }

    fn descend(
        &mut self,
        level: usize,
        g: &IElem,
        allowance: usize,
        params: &mut Vec<String>,
    ) -> Option<IElem> {
        if level > self.x.n() {
            return Some(g.clone());
        }
        if self.meter.exhausted() {
            return None;
        }
        let a = g.lower_action(level).apply_raw(self.x.component(level));
        for cand in self.candidates(level, &a, allowance) {
            if self.meter.exhausted() {
                return None;
            }
            if cand.cost > allowance {
                continue;
            }
            let mut next = g.clone();
            next.set_component(level, cand.h);
            params.push(cand.parameter);
            if let Some(found) = self.descend(level + 1, &next, allowance - cand.cost, params) {
                return Some(found);
            }
            params.pop();
        }
        None
    }

    /// Iterative deepening over the total allowance.
    fn run(&mut self) -> Option<(IElem, Vec<String>)> {
        for allowance in 0..=self.budget.len {
            let mut params = Vec::new();
            if let Some(g) = self.descend(2, &IElem::identity(self.x.n()), allowance, &mut params) {
                return Some((g, params));
            }
            if self.meter.exhausted() {
                break;
            }
        }
        None
    }
}

/// All reduced words of rank `rank` and length at most `maxlen`, shortest first.
fn all_words(rank: usize, maxlen: usize, meter: &mut Meter) -> Vec<FreeWord> {
    let mut out = vec![FreeWord::identity(rank)];
    let mut frontier = 0;
    for _ in 0..maxlen {
        let end = out.len();
        for idx in frontier..end {
            let w = out[idx].clone();
            for k in 1..=rank as Letter {
                for s in [k, -k] {
                    if w.letters().last() == Some(&-s) {
                        continue;
                    }
                    if !meter.take(1) {
                        return out;
                    }
                    out.push(w.push_letter(s));
                }
            }
        }
        frontier = end;
    }
    out
}

fn signed_generators(n: usize) -> Vec<YLetter> {
    generators(n)
        .into_iter()
        .flat_map(|(m, i)| [YLetter::new(m, i, 1), YLetter::new(m, i, -1)])
        .collect()
}

/// `l · e · l⁻¹`.
fn conj_by_letter(e: &IElem, l: YLetter) -> IElem {
    let inv = IElem::collect(e.n(), &[l.inverse()]).expect("valid letter");
    e.left_mul_gen(l).imul(&inv).expect("same n")
}

/// Conjugates by single generators while that shortens the normal form.
/// Returns `(p e p⁻¹, p)`.
fn shorten(e: &IElem, letters: &[YLetter], meter: &mut Meter) -> (IElem, IElem) {
    let mut cur = e.clone();
    let mut p = IElem::identity(e.n());
    while meter.take(letters.len()) {
        let best =
            letters.iter().map(|&l| (conj_by_letter(&cur, l), l)).min_by_key(|(c, _)| c.len());
        match best {
            Some((next, l)) if next.len() < cur.len() => {
                cur = next;
                p = p.left_mul_gen(l);
            }
            _ => break,
        }
    }
    (cur, p)
}

/// One side of the generator-word search: every `p e p⁻¹` with `p` a reduced
/// generator word of length at most the current radius.
struct Ball {
    seen: HashMap<IElem, IElem>,
    frontier: Vec<(IElem, IElem, Option<YLetter>)>,
    radius: usize,
}

impl Ball {
    fn new(e: &IElem) -> Self {
        let id = IElem::identity(e.n());
        Ball {
            seen: HashMap::from([(e.clone(), id.clone())]),
            frontier: vec![(e.clone(), id, None)],
            radius: 0,
        }
    }

    /// Grows the ball by one layer; returns a pair `(p, q)` with
    /// `p e p⁻¹ = q f q⁻¹` as soon as the layer touches `other`.
    fn grow(
        &mut self,
        other: &Ball,
        letters: &[YLetter],
        meter: &mut Meter,
    ) -> Option<Result<(IElem, IElem), ()>> {
        let mut next = Vec::new();
        for (e, p, last) in std::mem::take(&mut self.frontier) {
            for &l in letters {
                if last == Some(l.inverse()) {
                    continue;
                }
                if !meter.take(1) {
                    return Some(Err(()));
                }
                let c = conj_by_letter(&e, l);
                if self.seen.contains_key(&c) {
                    continue;
                }
                let pc = p.left_mul_gen(l);
                if let Some(q) = other.seen.get(&c) {
                    return Some(Ok((pc, q.clone())));
                }
                self.seen.insert(c.clone(), pc.clone());
                next.push((c, pc, Some(l)));
            }
        }
        self.frontier = next;
        self.radius += 1;
        None
    }
}

/// Meet-in-the-middle over generator words `g` with `|g| ≤ maxlen` and
/// `g x g⁻¹ = y`.
fn generator_meet(
    x: &IElem,
    y: &IElem,
    maxlen: usize,
    letters: &[YLetter],
    meter: &mut Meter,
) -> Option<IElem> {
    if x == y {
        return Some(IElem::identity(x.n()));
    }
    let (mut fx, mut fy) = (Ball::new(x), Ball::new(y));
    while fx.radius + fy.radius < maxlen {
        let grow_x = fx.seen.len() <= fy.seen.len();
        let hit = if grow_x {
            fx.grow(&fy, letters, meter)
        } else {
            fy.grow(&fx, letters, meter).map(|r| r.map(|(q, p)| (p, q)))
        };
        match hit {
            // p x p⁻¹ = q y q⁻¹
            Some(Ok((p, q))) => return Some(q.iinv().imul(&p).expect("same n")),
            Some(Err(())) => return None,
            None => {
                if fx.frontier.is_empty() && fy.frontier.is_empty() {
                    return None;
                }
            }
        }
    }
    None
}

/// Decides whether `g x g⁻¹ = y` for some `g ∈ I_n`, within `budget`.
///
/// Both elements are first shortened by conjugating with single generators.
/// The level ladder then runs on the shortened pair with a quarter of the
/// node budget. The rest goes to a meet-in-the-middle search from `x` and `y`
/// over conjugators written as generator words of length at most
/// `budget.len`, which is exhaustive whenever the node cap is not reached.
pub fn conjugacy(x: &IElem, y: &IElem, budget: &SearchBudget) -> Result<ConjResult, Error> {
    if x.n() != y.n() {
        return Err(Error::RankMismatch { left: x.n(), right: y.n() });
    }
    let n = x.n();
    let refuted = |reason| ConjResult {
        verdict: Verdict::NotConjugate { reason },
        witness: None,
        levels: Vec::new(),
    };
    let (ax, ay) = (x.abelianize(), y.abelianize());
    if ax != ay {
        return Ok(refuted(Refutation::Abelianization { x: ax, y: ay }));
    }
    let (w2, z2) = (x.component(2), y.component(2));
    if FreeWord::free_conjugate(w2, z2)?.is_none() {
        return Ok(refuted(Refutation::LevelTwoCore {
            w2: render_factor_word(2, w2),
            z2: render_factor_word(2, z2),
        }));
    }

    let letters = signed_generators(n);
    let mut meter = Meter { used: 0, cap: budget.nodes };
    let (xs, p) = shorten(x, &letters, &mut meter);
    let (ys, q) = shorten(y, &letters, &mut meter);

    let mut twists = vec![None, None];
    for level in 2..=n {
        twists.push(Some(TwistTable::new(&ys.lower_action(level))));
    }
    let ladder_cap = meter.used + budget.nodes.saturating_sub(meter.used) / 4;
    let mut ladder = Ladder {
        x: &xs,
        y: &ys,
        budget: *budget,
        twists,
        meter: Meter { used: meter.used, cap: ladder_cap },
    };
    let found = match ladder.run() {
        // gs xs gs⁻¹ = ys with xs = p x p⁻¹ and ys = q y q⁻¹
        Some((gs, params)) => Some((q.iinv().imul(&gs)?.imul(&p)?, params)),
        None => {
            meter.used = ladder.meter.used.min(ladder_cap);
            generator_meet(x, y, budget.len, &letters, &mut meter)
                .map(|g| (g, vec!["generator search".to_string(); n - 1]))
        }
    };
    let Some((g, params)) = found else {
        return Ok(ConjResult {
            verdict: Verdict::Unknown { bounds: *budget, nodes_used: meter.used },
            witness: None,
            levels: Vec::new(),
        });
    };
    let check = g.imul(x)?.imul(&g.iinv())?;
    assert_eq!(&check, y, "conjugacy witness failed verification");
    let levels = peel(x, &g)?
        .into_iter()
        .rev()
        .zip(params)
        .map(|(pl, parameter)| LevelTrace {
            level: pl.level,
            a: render_factor_word(pl.level, &pl.a),
            b: pl.b.to_string(),
            twist: format!("conjugation by {}", y.below(pl.level)),
            parameter,
            g: render_factor_word(pl.level, g.component(pl.level)),
        })
        .collect();
    Ok(ConjResult {
        verdict: Verdict::Conjugate { witness: g.to_string() },
        witness: Some(g),
        levels,
    })
}
