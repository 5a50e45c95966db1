//! Exact integer lattices in `Z^dim`, kept as a sparse row-echelon basis.
//!
//! Rows are inserted one at a time and merged into the basis with unimodular
//! row operations, so the basis always spans exactly the lattice generated
//! by everything inserted so far. Coefficients start as checked `i64` and the
//! whole basis is promoted to `BigInt` the first time an operation overflows.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A sparse row: `(column, nonzero entry)` pairs with increasing columns.
pub type SparseRow<T> = Vec<(u32, T)>;

/// The arithmetic an echelon basis needs. Every operation may report
/// overflow by returning `None`.
pub trait Coef: Clone + Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn neg(&self) -> Option<Self>;
    fn add(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    /// Floor division and remainder with a positive divisor.
    fn div_floor(&self, o: &Self) -> Option<Self>;
    fn is_multiple_of(&self, o: &Self) -> bool;
    /// `(g, s, t)` with `g = gcd(a, b) = s·a + t·b` and `g > 0`.
    fn ext_gcd(a: &Self, b: &Self) -> Option<(Self, Self, Self)>;
    fn to_big(&self) -> BigInt;
}

impl Coef for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn div_floor(&self, o: &Self) -> Option<Self> {
        if *self == i64::MIN {
            return None;
        }
        Some(Integer::div_floor(self, o))
    }
    fn is_multiple_of(&self, o: &Self) -> bool {
        *o != 0 && self % o == 0
    }
    fn ext_gcd(a: &Self, b: &Self) -> Option<(Self, Self, Self)> {
        let e = (*a as i128).extended_gcd(&(*b as i128));
        let (mut g, mut s, mut t) = (e.gcd, e.x, e.y);
        if g < 0 {
            g = -g;
            s = -s;
            t = -t;
        }
        Some((g.try_into().ok()?, s.try_into().ok()?, t.try_into().ok()?))
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Coef for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div_floor(&self, o: &Self) -> Option<Self> {
        Some(Integer::div_floor(self, o))
    }
    fn is_multiple_of(&self, o: &Self) -> bool {
        !Zero::is_zero(o) && Zero::is_zero(&(self % o))
    }
    fn ext_gcd(a: &Self, b: &Self) -> Option<(Self, Self, Self)> {
        let e = a.extended_gcd(b);
        if Signed::is_negative(&e.gcd) {
            Some((-e.gcd, -e.x, -e.y))
        } else {
            Some((e.gcd, e.x, e.y))
        }
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// `a·u + b·v`, dropping zeros.
fn combine<T: Coef>(a: &T, u: &[(u32, T)], b: &T, v: &[(u32, T)]) -> Option<SparseRow<T>> {
    let mut out = Vec::with_capacity(u.len().max(v.len()));
    let (mut i, mut j) = (0, 0);
    while i < u.len() || j < v.len() {
        let (col, val) = if j >= v.len() || (i < u.len() && u[i].0 < v[j].0) {
            let r = (u[i].0, a.mul(&u[i].1)?);
            i += 1;
            r
        } else if i >= u.len() || v[j].0 < u[i].0 {
            let r = (v[j].0, b.mul(&v[j].1)?);
            j += 1;
            r
        } else {
            let r = (u[i].0, a.mul(&u[i].1)?.add(&b.mul(&v[j].1)?)?);
            i += 1;
            j += 1;
            r
        };
        if !val.is_zero() {
            out.push((col, val));
        }
    }
    Some(out)
}

fn negate<T: Coef>(v: &[(u32, T)]) -> Option<SparseRow<T>> {
    v.iter().map(|(c, x)| Some((*c, x.neg()?))).collect()
}

#[derive(Debug, Clone)]
struct Echelon<T> {
    dim: usize,
    /// Pivot column → basis row whose first entry sits in that column and is positive.
    rows: BTreeMap<u32, SparseRow<T>>,
}

impl<T: Coef> Echelon<T> {
    fn new(dim: usize) -> Self {
        Echelon { dim, rows: BTreeMap::new() }
    }

    /// Merges `v` into the basis. On overflow returns the part of `v` not yet
    /// absorbed; the basis together with that remainder still spans the
    /// intended lattice.
    fn insert(&mut self, v: SparseRow<T>) -> Result<(), SparseRow<T>> {
        let mut v = v;
        loop {
            let Some((c, b)) = v.first().cloned() else {
                return Ok(());
            };
            let Some(p) = self.rows.get(&c) else {
                if b.is_negative() {
                    match negate(&v) {
                        Some(n) => v = n,
                        None => return Err(v),
                    }
                }
                self.rows.insert(c, v);
                return Ok(());
            };
            let a = p[0].1.clone();
            if b.is_multiple_of(&a) {
                let step = b
                    .div_floor(&a)
                    .and_then(|q| q.neg())
                    .and_then(|q| combine(&T::one(), &v, &q, p));
                match step {
                    Some(next) => v = next,
                    None => return Err(v),
                }
            } else {
                let step = (|| {
                    let (g, s, t) = T::ext_gcd(&a, &b)?;
                    let new_pivot = combine(&s, p, &t, &v)?;
                    let bg = b.div_floor(&g)?;
                    let ag = a.div_floor(&g)?.neg()?;
                    let rest = combine(&bg, p, &ag, &v)?;
                    Some((new_pivot, rest))
                })();
                match step {
                    Some((new_pivot, rest)) => {
                        debug_assert_eq!(new_pivot[0].0, c);
                        self.rows.insert(c, new_pivot);
                        v = rest;
                    }
                    None => return Err(v),
                }
            }
        }
    }

    /// `Some(true)` if `v` lies in the lattice; `None` on overflow.
    fn contains(&self, v: &[(u32, T)]) -> Option<bool> {
        let mut v = v.to_vec();
        loop {
            let Some((c, b)) = v.first().cloned() else {
                return Some(true);
            };
            let Some(p) = self.rows.get(&c) else {
                return Some(false);
            };
            let a = &p[0].1;
            if !b.is_multiple_of(a) {
                return Some(false);
            }
            let q = b.div_floor(a)?.neg()?;
            v = combine(&T::one(), &v, &q, p)?;
        }
    }

    fn promote(&self) -> Echelon<BigInt> {
        Echelon {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .map(|(c, r)| (*c, r.iter().map(|(k, x)| (*k, x.to_big())).collect()))
                .collect(),
        }
    }

    fn big_rows(&self) -> Vec<SparseRow<BigInt>> {
        self.promote().rows.into_values().collect()
    }
}

#[derive(Debug, Clone)]
enum Basis {
    Small(Echelon<i64>),
    Big(Echelon<BigInt>),
}

/// A sublattice of `Z^dim`.
#[derive(Debug, Clone)]
pub struct Lattice {
    basis: Basis,
}

fn to_small(v: &[(u32, BigInt)]) -> Option<SparseRow<i64>> {
    v.iter().map(|(c, x)| Some((*c, x.to_i64()?))).collect()
}

fn sparse_from_dense<T: Coef>(v: &[T]) -> SparseRow<T> {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(c, x)| (c as u32, x.clone())).collect()
}

impl Lattice {
    pub fn new(dim: usize) -> Self {
        Lattice { basis: Basis::Small(Echelon::new(dim)) }
    }

    pub fn from_rows<'a>(dim: usize, rows: impl IntoIterator<Item = &'a [i64]>) -> Self {
        let mut l = Lattice::new(dim);
        for r in rows {
            l.insert_dense(r);
        }
        l
    }

    pub fn dim(&self) -> usize {
        match &self.basis {
            Basis::Small(e) => e.dim,
            Basis::Big(e) => e.dim,
        }
    }

    pub fn rank(&self) -> usize {
        match &self.basis {
            Basis::Small(e) => e.rows.len(),
            Basis::Big(e) => e.rows.len(),
        }
    }

    fn check_columns<T>(&self, v: &[(u32, T)]) {
        let dim = self.dim();
        assert!(v.iter().all(|(c, _)| (*c as usize) < dim), "column out of range for Z^{dim}");
    }

    pub fn insert_dense(&mut self, v: &[i64]) {
        assert_eq!(v.len(), self.dim(), "vector length must equal the lattice dimension");
        self.insert_sparse(sparse_from_dense(v));
    }

    pub fn insert_sparse(&mut self, v: SparseRow<i64>) {
        self.check_columns(&v);
        if let Basis::Small(e) = &mut self.basis {
            match e.insert(v) {
                Ok(()) => (),
                Err(rest) => {
                    self.basis = Basis::Big(e.promote());
                    self.insert_big(big_row(&rest));
                }
            }
        } else {
            self.insert_big(big_row(&v));
        }
    }

    pub fn insert_big(&mut self, v: SparseRow<BigInt>) {
        self.check_columns(&v);
        let mut v = v;
        if let Basis::Small(e) = &mut self.basis {
            if let Some(small) = to_small(&v) {
                match e.insert(small) {
                    Ok(()) => return,
                    Err(rest) => v = big_row(&rest),
                }
            }
            self.basis = Basis::Big(e.promote());
        }
        let Basis::Big(e) = &mut self.basis else { unreachable!() };
        e.insert(v).expect("big integer arithmetic cannot overflow");
    }

    pub fn contains_dense(&self, v: &[i64]) -> bool {
        self.contains_sparse(&sparse_from_dense(v))
    }

    pub fn contains_sparse(&self, v: &[(u32, i64)]) -> bool {
        match &self.basis {
            Basis::Small(e) => match e.contains(v) {
                Some(ans) => ans,
                None => e.promote().contains(&big_row(v)).expect("no overflow"),
            },
            Basis::Big(e) => e.contains(&big_row(v)).expect("no overflow"),
        }
    }

    pub fn contains_big(&self, v: &[(u32, BigInt)]) -> bool {
        match to_small(v) {
            Some(s) => self.contains_sparse(&s),
            None => self.big_echelon().contains(v).expect("no overflow"),
        }
    }

    /// Every basis row of `other` lies in `self`.
    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis_rows().iter().all(|r| self.contains_big(r))
    }

    fn big_echelon(&self) -> Echelon<BigInt> {
        match &self.basis {
            Basis::Small(e) => e.promote(),
            Basis::Big(e) => e.clone(),
        }
    }

    /// The echelon basis rows, in pivot order.
    pub fn basis_rows(&self) -> Vec<SparseRow<BigInt>> {
        match &self.basis {
            Basis::Small(e) => e.big_rows(),
            Basis::Big(e) => e.rows.values().cloned().collect(),
        }
    }

    pub fn pivots(&self) -> Vec<(usize, BigInt)> {
        self.basis_rows().iter().map(|r| (r[0].0 as usize, r[0].1.clone())).collect()
    }

    /// Canonical Hermite normal form: echelon rows with positive pivots and
    /// every entry above a pivot reduced into `0..pivot`.
    pub fn hnf(&self) -> Vec<SparseRow<BigInt>> {
        let mut rows = self.basis_rows();
        for k in (0..rows.len()).rev() {
            let (pc, pv) = rows[k][0].clone();
            for r in 0..k {
                let entry = rows[r].iter().find(|(c, _)| *c == pc).map(|(_, x)| x.clone());
                if let Some(x) = entry {
                    let q = Integer::div_floor(&x, &pv);
                    if !Zero::is_zero(&q) {
                        let p = rows[k].clone();
                        rows[r] = combine(&<BigInt as One>::one(), &rows[r], &-q, &p).expect("big");
                    }
                }
            }
        }
        rows
    }

    pub fn lattice_eq(&self, other: &Lattice) -> bool {
        self.dim() == other.dim() && self.rank() == other.rank() && self.hnf() == other.hnf()
    }

    /// Nonzero invariant factors of the lattice's basis matrix.
    pub fn smith_invariants(&self) -> Vec<BigInt> {
        if self.rank() == self.dim() {
            // full rank: all ones is equivalent to unit pivots, the common case
            if self.pivots().iter().all(|(_, p)| One::is_one(p)) {
                return vec![<BigInt as One>::one(); self.rank()];
            }
        }
        let rows = self.basis_rows();
        let mut m: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| {
                let mut d = vec![<BigInt as Zero>::zero(); self.dim()];
                for (c, x) in r {
                    d[*c as usize] = x.clone();
                }
                d
            })
            .collect();
        smith_dense(&mut m)
    }

    /// The quotient `Z^dim / L` is torsion free.
    pub fn is_saturated(&self) -> bool {
        self.smith_invariants().iter().all(One::is_one)
    }

    /// `L = Z^dim`.
    pub fn is_whole(&self) -> bool {
        self.rank() == self.dim() && self.pivots().iter().all(|(_, p)| One::is_one(p))
    }
}

fn big_row(v: &[(u32, i64)]) -> SparseRow<BigInt> {
    v.iter().map(|(c, x)| (*c, BigInt::from(*x))).collect()
}

/// Diagonalizes a dense integer matrix in place and returns the nonzero
/// invariant factors in divisibility order.
pub fn smith_dense(m: &mut [Vec<BigInt>]) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the trailing block as pivot
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !Zero::is_zero(x) && best.is_none_or(|(bi, bj)| x.abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !Zero::is_zero(&m[i][t]) {
                    let q = Integer::div_floor(&m[i][t], &m[t][t]);
                    let (top, bottom) = m.split_at_mut(i);
                    for (x, p) in bottom[0][t..].iter_mut().zip(&top[t][t..]) {
                        *x -= &q * p;
                    }
                    if !Zero::is_zero(&m[i][t]) {
                        m.swap(t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !Zero::is_zero(&m[t][j]) {
                    let q = Integer::div_floor(&m[t][j], &m[t][t]);
                    for row in m.iter_mut().skip(t) {
                        let d = &q * &row[t];
                        row[j] -= d;
                    }
                    if !Zero::is_zero(&m[t][j]) {
                        for row in m.iter_mut() {
                            row.swap(t, j);
                        }
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // divisibility condition on the remaining block
            let p = m[t][t].clone();
            let bad =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !Zero::is_zero(&(&m[i][j] % &p))));
            match bad {
                Some(i) => {
                    let (top, bottom) = m.split_at_mut(i);
                    for (x, p) in top[t][t..].iter_mut().zip(&bottom[0][t..]) {
                        *x += p;
                    }
                }
                None => break,
            }
        }
        out.push(m[t][t].abs());
        t += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn rank_and_membership() {
        let l = Lattice::from_rows(3, [&[2, 0, 0][..], &[0, 3, 0], &[2, 3, 0]]);
        assert_eq!(l.rank(), 2);
        assert!(l.contains_dense(&[4, -3, 0]));
        assert!(!l.contains_dense(&[1, 0, 0]));
        assert!(!l.contains_dense(&[0, 0, 1]));
    }

    #[test]
    fn gcd_merging_keeps_the_lattice() {
        let l = Lattice::from_rows(2, [&[4, 1][..], &[6, 0]]);
        assert_eq!(l.rank(), 2);
        // det = -6, so index 6
        let prod: BigInt = l.pivots().iter().map(|(_, p)| p.clone()).product();
        assert_eq!(prod, BigInt::from(6));
        assert!(l.contains_dense(&[4, 1]) && l.contains_dense(&[6, 0]));
        assert!(!l.contains_dense(&[1, 0]));
        assert!(l.contains_dense(&[2, -1]));
    }

    #[test]
    fn whole_lattice_detection() {
        let l = Lattice::from_rows(2, [&[2, 1][..], &[1, 1]]);
        assert!(l.is_whole());
        let l = Lattice::from_rows(2, [&[2, 0][..], &[0, 1]]);
        assert!(!l.is_whole());
        assert_eq!(l.smith_invariants(), big(&[1, 2]));
    }

    #[test]
    fn hnf_is_canonical() {
        let a = Lattice::from_rows(3, [&[1, 2, 3][..], &[0, 2, 4]]);
        let b = Lattice::from_rows(3, [&[1, 4, 7][..], &[1, 2, 3], &[0, 4, 8]]);
        assert!(a.lattice_eq(&b));
        assert!(a.contains_lattice(&b) && b.contains_lattice(&a));
        let c = Lattice::from_rows(3, [&[1, 2, 3][..], &[0, 4, 8]]);
        assert!(!a.lattice_eq(&c));
        assert!(a.contains_lattice(&c));
    }

    #[test]
    fn smith_of_rank_deficient_lattice() {
        let l = Lattice::from_rows(3, [&[2, 4, 4][..], &[-6, 6, 12], &[10, -4, -16]]);
        assert_eq!(l.smith_invariants(), big(&[2, 6, 12]));
        let d = Lattice::from_rows(3, [&[2, 4, 4][..], &[4, 8, 8], &[0, 3, 6]]);
        assert_eq!(d.rank(), 2);
        assert_eq!(d.smith_invariants(), big(&[1, 6]));
        let s = Lattice::from_rows(3, [&[1, 1, 0][..]]);
        assert!(s.is_saturated());
        let t = Lattice::from_rows(3, [&[2, 2, 0][..]]);
        assert!(!t.is_saturated());
    }

    #[test]
    fn overflow_promotes_to_big_integers() {
        let huge = i64::MAX / 2;
        let mut l = Lattice::new(2);
        l.insert_dense(&[huge, 1]);
        l.insert_dense(&[huge - 1, 3]);
        l.insert_dense(&[3, huge]);
        assert_eq!(l.rank(), 2);
        assert!(l.contains_dense(&[huge, 1]));
        assert!(l.contains_dense(&[3, huge]));
    }
}
