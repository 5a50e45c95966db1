//! Truncated noncommutative polynomials over Z and the Magnus embedding of a
//! free group into them.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::endos::EndoF;
use crate::error::Error;
use crate::words::FreeWord;

/// A monomial `X_{a1} X_{a2} ... X_{ak}` with 1-based variable indices.
/// Ordered by length, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<u16>);

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mono {
    pub fn degree(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for v in &self.0 {
            write!(f, "X{v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct NcPoly {
    nvars: usize,
    maxdeg: usize,
    terms: BTreeMap<Mono, BigInt>,
}

impl NcPoly {
    pub fn zero(nvars: usize, maxdeg: usize) -> Self {
        NcPoly { nvars, maxdeg, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize, maxdeg: usize) -> Self {
        let mut p = Self::zero(nvars, maxdeg);
        p.terms.insert(Mono(Vec::new()), BigInt::one());
        p
    }

    pub fn var(nvars: usize, maxdeg: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= nvars, "variable X{i} out of range");
        Self::monomial(nvars, maxdeg, Mono(vec![i as u16]), BigInt::one())
    }

    /// A single term; terms above the truncation degree give zero.
    pub fn monomial(nvars: usize, maxdeg: usize, m: Mono, coeff: BigInt) -> Self {
        let mut p = Self::zero(nvars, maxdeg);
        if m.degree() <= maxdeg && !coeff.is_zero() {
            p.terms.insert(m, coeff);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn maxdeg(&self) -> usize {
        self.maxdeg
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds one term; terms above the truncation degree are dropped.
    pub(crate) fn add_term(&mut self, m: Mono, c: BigInt) {
        if m.degree() > self.maxdeg || c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_compatible(&self, other: &NcPoly) {
        assert_eq!(
            (self.nvars, self.maxdeg),
            (other.nvars, other.maxdeg),
            "incompatible polynomial rings"
        );
    }

    pub fn add(&self, other: &NcPoly) -> NcPoly {
        self.check_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &NcPoly) -> NcPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NcPoly {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, k: &BigInt) -> NcPoly {
        let mut out = Self::zero(self.nvars, self.maxdeg);
        if !k.is_zero() {
            out.terms = self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect();
        }
        out
    }

    /// Truncated product.
    pub fn mul(&self, other: &NcPoly) -> NcPoly {
        self.check_compatible(other);
        let mut out = Self::zero(self.nvars, self.maxdeg);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma.degree() + mb.degree() > self.maxdeg {
                    // terms are sorted by degree, so later ones are no better
                    break;
                }
                let mut m = ma.0.clone();
                m.extend_from_slice(&mb.0);
                out.add_term(Mono(m), ca * cb);
            }
        }
        out
    }

    /// `self · X_i`, truncated.
    fn mul_var(&self, i: u16) -> NcPoly {
        let mut out = Self::zero(self.nvars, self.maxdeg);
        for (m, c) in &self.terms {
            if m.degree() < self.maxdeg {
                let mut v = m.0.clone();
                v.push(i);
                out.terms.insert(Mono(v), c.clone());
            }
        }
        out
    }

    /// `self += k · other`.
    pub(crate) fn add_scaled(&mut self, k: &BigInt, other: &NcPoly) {
        self.check_compatible(other);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * k);
        }
    }

    /// The smallest term in the monomial order.
    pub(crate) fn leading(&self) -> Option<(&Mono, &BigInt)> {
        self.terms.iter().next()
    }

    /// The degree-`d` homogeneous component.
    pub fn homogeneous_part(&self, d: usize) -> NcPoly {
        let mut out = Self::zero(self.nvars, self.maxdeg);
        out.terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() == d)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        out
    }

    /// Lowest degree carrying a nonzero term, ignoring the constant term.
    pub fn lowest_positive_degree(&self) -> Option<usize> {
        self.terms.keys().map(Mono::degree).find(|&d| d > 0)
    }

    /// Terms as `{monomial, coeff}` objects in storage order. Coefficients that
    /// fit in an `i64` are numbers, larger ones are decimal strings.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| {
                    let coeff = match c.to_i64() {
                        Some(v) => json!(v),
                        None => json!(c.to_string()),
                    };
                    json!({ "monomial": m.0, "coeff": coeff })
                })
                .collect(),
        )
    }
}

impl fmt::Debug for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() {
                "-"
            } else if k > 0 {
                "+"
            } else {
                ""
            };
            if k > 0 {
                f.write_str(" ")?;
            }
            let a = c.abs();
            if a.is_one() && m.degree() > 0 {
                write!(f, "{sign}{m:?}")?;
            } else if m.degree() == 0 {
                write!(f, "{sign}{a}")?;
            } else {
                write!(f, "{sign}{a}{m:?}")?;
            }
        }
        Ok(())
    }
}

/// Magnus image of `w`: `x_i ↦ 1 + X_i`, `x_i⁻¹ ↦ 1 − X_i + X_i² − …`,
/// truncated above degree `maxdeg`.
pub fn magnus_expand(w: &FreeWord, maxdeg: usize) -> NcPoly {
    let mut p = NcPoly::one(w.rank(), maxdeg);
    for &x in w.letters() {
        let v = x.unsigned_abs() as u16;
        if x > 0 {
            p = p.add(&p.mul_var(v));
        } else {
            // p · Σ_k (−X)^k, accumulated one power at a time
            let mut acc = p.clone();
            let mut power = p;
            for _ in 0..maxdeg {
                power = power.mul_var(v).neg();
                if power.is_zero() {
                    break;
                }
                acc = acc.add(&power);
            }
            p = acc;
        }
    }
    p
}

/// Lower-central-series depth as seen through a truncated Magnus image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Exact(usize),
    /// No nonzero term up to the truncation; the depth is at least this value.
    AtLeast(usize),
    /// The element is the identity.
    Identity,
}

impl Depth {
    /// A lower bound on the depth; the identity is arbitrarily deep.
    pub fn lower_bound(self) -> usize {
        match self {
            Depth::Exact(c) | Depth::AtLeast(c) => c,
            Depth::Identity => usize::MAX,
        }
    }

    pub fn exact(self) -> Option<usize> {
        match self {
            Depth::Exact(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Exact(c) => write!(f, "{c}"),
            Depth::AtLeast(c) => write!(f, ">= {c}"),
            Depth::Identity => f.write_str("identity"),
        }
    }
}

pub fn gamma_degree(w: &FreeWord, maxdeg: usize) -> Depth {
    if w.is_identity() {
        return Depth::Identity;
    }
    match magnus_expand(w, maxdeg).lowest_positive_degree() {
        Some(c) => Depth::Exact(c),
        None => Depth::AtLeast(maxdeg + 1),
    }
}

/// The words `f(x_i) · x_i⁻¹`, one per generator.
fn displacements(f: &EndoF) -> Vec<FreeWord> {
    f.images().iter().enumerate().map(|(k, img)| img.push_letter(-((k + 1) as i32))).collect()
}

/// Largest `c` with `f(x_i) x_i⁻¹ ∈ γ_c` for every `i`, read off up to the
/// truncation degree.
pub fn ia_degree(f: &EndoF, maxdeg: usize) -> Result<Depth, Error> {
    let mut best = Depth::Identity;
    for (k, d) in displacements(f).iter().enumerate() {
        let g = gamma_degree(d, maxdeg);
        if let Depth::Exact(c) = g {
            if c < 2 {
                return Err(Error::NotIA { index: k + 1, degree: c });
            }
        }
        best = match (best, g) {
            (Depth::Exact(a), Depth::Exact(b)) => Depth::Exact(a.min(b)),
            (Depth::Exact(a), _) | (_, Depth::Exact(a)) => Depth::Exact(a),
            (Depth::AtLeast(a), _) | (_, Depth::AtLeast(a)) => Depth::AtLeast(a),
            (Depth::Identity, Depth::Identity) => Depth::Identity,
        };
    }
    Ok(best)
}

/// Degree-`c` components of the Magnus images of `f(x_i) x_i⁻¹`.
pub fn johnson_image(f: &EndoF, c: usize, maxdeg: usize) -> Result<Vec<NcPoly>, Error> {
    if c == 0 || c > maxdeg {
        return Err(Error::Precondition(format!("johnson degree {c} must lie in 1..={maxdeg}")));
    }
    let depth = ia_degree(f, maxdeg)?;
    if depth.lower_bound() < c {
        return Err(Error::Precondition(format!("automorphism has IA degree {depth} < {c}")));
    }
    Ok(displacements(f).iter().map(|d| magnus_expand(d, c).homogeneous_part(c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str, n: usize) -> FreeWord {
        FreeWord::parse(s, n).unwrap()
    }

    fn poly(n: usize, d: usize, terms: &[(&[u16], i64)]) -> NcPoly {
        let mut p = NcPoly::zero(n, d);
        for (m, c) in terms {
            p = p.add(&NcPoly::monomial(n, d, Mono(m.to_vec()), BigInt::from(*c)));
        }
        p
    }

    #[test]
    fn expand_examples() {
        assert_eq!(magnus_expand(&w("x1", 2), 2), poly(2, 2, &[(&[], 1), (&[1], 1)]));
        assert_eq!(magnus_expand(&w("x1 x1^-1", 2), 3), NcPoly::one(2, 3));
        assert_eq!(
            magnus_expand(&w("x1 x2 x1^-1 x2^-1", 2), 2),
            poly(2, 2, &[(&[], 1), (&[1, 2], 1), (&[2, 1], -1)])
        );
    }

    #[test]
    fn inverse_letter_series() {
        let p = magnus_expand(&w("x1^-1", 1), 4);
        assert_eq!(
            p,
            poly(1, 4, &[(&[], 1), (&[1], -1), (&[1, 1], 1), (&[1, 1, 1], -1), (&[1, 1, 1, 1], 1)])
        );
    }

    #[test]
    fn monomial_order_is_length_then_lex() {
        let mut v = vec![Mono(vec![2]), Mono(vec![1, 1]), Mono(vec![]), Mono(vec![1])];
        v.sort();
        assert_eq!(v, vec![Mono(vec![]), Mono(vec![1]), Mono(vec![2]), Mono(vec![1, 1])]);
    }

    #[test]
    fn gamma_degree_examples() {
        assert_eq!(gamma_degree(&w("x1", 2), 4), Depth::Exact(1));
        assert_eq!(gamma_degree(&w("x1 x2 x1^-1 x2^-1", 2), 4), Depth::Exact(2));
        let (a, b) = (w("x1", 2), w("x2", 2));
        let c3 = FreeWord::commutator(&FreeWord::commutator(&a, &b), &a);
        assert_eq!(gamma_degree(&c3, 4), Depth::Exact(3));
        assert_eq!(gamma_degree(&c3, 2), Depth::AtLeast(3));
        assert_eq!(gamma_degree(&FreeWord::identity(2), 4), Depth::Identity);
    }

    #[test]
    fn ia_degree_examples() {
        assert_eq!(ia_degree(&EndoF::identity(3), 4).unwrap(), Depth::Identity);
        let t = EndoF::inner(&w("x1", 2));
        assert_eq!(ia_degree(&t, 4).unwrap(), Depth::Exact(2));
        let g = FreeWord::commutator(&w("x1", 2), &w("x2", 2));
        assert_eq!(ia_degree(&EndoF::inner(&g), 5).unwrap(), Depth::Exact(3));
        let swap = EndoF::from_images(vec![w("x2", 2), w("x1", 2)]).unwrap();
        assert!(matches!(ia_degree(&swap, 3), Err(Error::NotIA { .. })));
    }

    #[test]
    fn johnson_image_examples() {
        let f = EndoF::y_gen(3, 2, 1).unwrap();
        let j = johnson_image(&f, 2, 3).unwrap();
        assert!(j[0].is_zero() && j[2].is_zero());
        assert_eq!(j[1], poly(3, 2, &[(&[1, 2], -1), (&[2, 1], 1)]));

        for p in johnson_image(&EndoF::identity(3), 2, 3).unwrap() {
            assert!(p.is_zero());
        }

        let t = EndoF::inner(&w("x1", 2));
        let j = johnson_image(&t, 2, 3).unwrap();
        assert!(j[0].is_zero());
        assert_eq!(j[1], poly(2, 2, &[(&[1, 2], 1), (&[2, 1], -1)]));
    }

    #[test]
    fn johnson_image_rejects_shallow_automorphisms() {
        let f = EndoF::y_gen(3, 2, 1).unwrap();
        assert!(johnson_image(&f, 3, 4).is_err());
        assert!(johnson_image(&f, 5, 4).is_err());
    }
}
