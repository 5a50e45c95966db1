//! Endomorphisms of a free group given by the images of its generators.
//!
//! Composition follows `(f ∘ g)(x) = f(g(x))` everywhere in the crate, and
//! commutators of automorphisms are `[f, g] = f⁻¹ ∘ g⁻¹ ∘ f ∘ g`.

use std::fmt;

use serde::Serialize;

use crate::error::Error;
use crate::words::{FreeWord, Letter};

#[derive(Clone)]
pub struct EndoF {
    rank: usize,
    images: Vec<FreeWord>,
    /// Images of the inverse automorphism, when known.
    inverse: Option<Vec<FreeWord>>,
}

impl PartialEq for EndoF {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.images == other.images
    }
}

impl Eq for EndoF {}

impl EndoF {
    pub fn identity(rank: usize) -> Self {
        let images: Vec<_> =
            (1..=rank).map(|k| FreeWord::from_letters(rank, [k as Letter])).collect();
        EndoF { rank, inverse: Some(images.clone()), images }
    }

    /// An endomorphism with no known inverse.
    pub fn from_images(images: Vec<FreeWord>) -> Result<Self, Error> {
        let rank = images.len();
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        if let Some(w) = images.iter().find(|w| w.rank() != rank) {
            return Err(Error::RankMismatch { left: rank, right: w.rank() });
        }
        Ok(EndoF { rank, images, inverse: None })
    }

    /// Attaches an inverse, checking that both composites fix every generator.
    pub fn with_inverse(self, inverse: EndoF) -> Result<Self, Error> {
        if inverse.rank != self.rank {
            return Err(Error::RankMismatch { left: self.rank, right: inverse.rank });
        }
        let id = EndoF::identity(self.rank);
        if self.compose_raw(&inverse) != id || inverse.compose_raw(&self) != id {
            return Err(Error::NotInvertible);
        }
        Ok(EndoF { inverse: Some(inverse.images), ..self })
    }

    /// `x_i ↦ x_j⁻¹ x_i x_j`, all other generators fixed.
    pub fn chi(n: usize, i: usize, j: usize) -> Result<Self, Error> {
        if i == j || i == 0 || j == 0 || i > n || j > n {
            return Err(Error::Index(format!("chi({n},{i},{j})")));
        }
        let (i, j) = (i as Letter, j as Letter);
        Ok(Self::from_generator_rule(n, |k| {
            if k == i {
                (vec![-j, i, j], vec![j, i, -j])
            } else {
                (vec![k], vec![k])
            }
        }))
    }

    /// `x_k ↦ x_i⁻¹ x_k x_i` for `k ≤ m`, generators above `m` fixed.
    pub fn y_gen(n: usize, m: usize, i: usize) -> Result<Self, Error> {
        if m < 2 || m > n || i == 0 || i > m {
            return Err(Error::Index(format!("y({m},{i}) in rank {n}")));
        }
        let (m, i) = (m as Letter, i as Letter);
        Ok(Self::from_generator_rule(n, |k| {
            if k <= m && k != i {
                (vec![-i, k, i], vec![i, k, -i])
            } else {
                (vec![k], vec![k])
            }
        }))
    }

    /// The inner automorphism `w ↦ h w h⁻¹`.
    pub fn inner(h: &FreeWord) -> Self {
        let rank = h.rank();
        let hi = h.invert();
        let gen = |k: usize| FreeWord::from_letters(rank, [k as Letter]);
        let images = (1..=rank).map(|k| h.conjugate(&gen(k))).collect();
        let inverse = (1..=rank).map(|k| hi.conjugate(&gen(k))).collect();
        EndoF { rank, images, inverse: Some(inverse) }
    }

    fn from_generator_rule(n: usize, rule: impl Fn(Letter) -> (Vec<Letter>, Vec<Letter>)) -> Self {
        let mut images = Vec::with_capacity(n);
        let mut inverse = Vec::with_capacity(n);
        for k in 1..=n as Letter {
            let (fwd, back) = rule(k);
            images.push(FreeWord::from_letters(n, fwd));
            inverse.push(FreeWord::from_letters(n, back));
        }
        EndoF { rank: n, images, inverse: Some(inverse) }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    pub fn image(&self, k: usize) -> &FreeWord {
        &self.images[k - 1]
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, w)| w.letters() == [(k + 1) as Letter])
    }

    pub fn inverse(&self) -> Result<EndoF, Error> {
        let inv = self.inverse.clone().ok_or(Error::NotInvertible)?;
        Ok(EndoF { rank: self.rank, images: inv, inverse: Some(self.images.clone()) })
    }

    pub fn apply(&self, w: &FreeWord) -> Result<FreeWord, Error> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch { left: self.rank, right: w.rank() });
        }
        Ok(self.apply_raw(w))
    }

    pub(crate) fn apply_raw(&self, w: &FreeWord) -> FreeWord {
        substitute(self.rank, &self.images, w)
    }

    pub fn compose(&self, g: &EndoF) -> Result<EndoF, Error> {
        if self.rank != g.rank {
            return Err(Error::RankMismatch { left: self.rank, right: g.rank });
        }
        Ok(self.compose_raw(g))
    }

    fn compose_raw(&self, g: &EndoF) -> EndoF {
        let images = g.images.iter().map(|w| self.apply_raw(w)).collect();
        let inverse = match (&self.inverse, &g.inverse) {
            (Some(fi), Some(gi)) => Some(fi.iter().map(|w| substitute(self.rank, gi, w)).collect()),
            _ => None,
        };
        EndoF { rank: self.rank, images, inverse }
    }

    /// `[f, g] = f⁻¹ ∘ g⁻¹ ∘ f ∘ g`.
    pub fn commutator(f: &EndoF, g: &EndoF) -> Result<EndoF, Error> {
        f.inverse()?.compose(&g.inverse()?)?.compose(f)?.compose(g)
    }
}

/// Replaces every letter of `w` by the corresponding image.
fn substitute(rank: usize, images: &[FreeWord], w: &FreeWord) -> FreeWord {
    let mut out = FreeWord::identity(rank);
    for &x in w.letters() {
        let img = &images[x.unsigned_abs() as usize - 1];
        out = if x > 0 { out.concat(img) } else { out.concat(&img.invert()) };
    }
    out
}

impl fmt::Debug for EndoF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EndoF[{}](", self.rank)?;
        for (k, w) in self.images.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "x{} -> {}", k + 1, w)?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct McCoolReport {
    pub n: usize,
    pub instances: usize,
    pub failures: Vec<String>,
}

impl McCoolReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks every instance of the three McCool relation families for the
/// standard χ generators.
pub fn check_mccool_relations(n: usize) -> McCoolReport {
    check_mccool_relations_with(n, |n, i, j| EndoF::chi(n, i, j).expect("valid indices"))
}

/// Same check against an arbitrary family standing in for `χ_ij`; the family
/// must return automorphisms with a stored inverse.
pub fn check_mccool_relations_with(
    n: usize,
    chi: impl Fn(usize, usize, usize) -> EndoF,
) -> McCoolReport {
    let table: Vec<Vec<Option<EndoF>>> = (0..=n)
        .map(|i| (0..=n).map(|j| (i > 0 && j > 0 && i != j).then(|| chi(n, i, j))).collect())
        .collect();
    let c = |i: usize, j: usize| table[i][j].as_ref().expect("i != j");
    let mut instances = 0;
    let mut failures = Vec::new();
    let mut record = |label: String, f: Result<EndoF, Error>| {
        instances += 1;
        match f {
            Ok(f) if f.is_identity() => {}
            Ok(_) => failures.push(label),
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    };
    let distinct =
        |v: &[usize]| v.iter().enumerate().all(|(a, x)| v[a + 1..].iter().all(|y| x != y));
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                if !distinct(&[i, j, k]) {
                    continue;
                }
                record(
                    format!("[chi({i},{j}), chi({k},{j})]"),
                    EndoF::commutator(c(i, j), c(k, j)),
                );
                let prod = c(i, j).compose(c(k, j));
                record(
                    format!("[chi({i},{j}) chi({k},{j}), chi({i},{k})]"),
                    prod.and_then(|p| EndoF::commutator(&p, c(i, k))),
                );
                for l in 1..=n {
                    if distinct(&[i, j, k, l]) {
                        record(
                            format!("[chi({i},{j}), chi({k},{l})]"),
                            EndoF::commutator(c(i, j), c(k, l)),
                        );
                    }
                }
            }
        }
    }
    McCoolReport { n, instances, failures }
}
