//! Even integer lattices standing in for the Picard lattice of a K3 surface.
//!
//! All arithmetic is exact. Intersection numbers are accumulated in `i128`
//! and narrowed back to `i64` with an explicit [`Error::Overflow`] instead of
//! wrapping, so every number that ends up in a certificate is the true value.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A divisor class, written in the coordinates of the lattice basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DivClass(Vec<i64>);

impl DivClass {
    pub fn new(coords: Vec<i64>) -> Self {
        DivClass(coords)
    }

    pub fn zero(rank: usize) -> Self {
        DivClass(vec![0; rank])
    }

    /// The `index`-th basis vector.
    pub fn basis(rank: usize, index: usize) -> Self {
        let mut coords = vec![0; rank];
        coords[index] = 1;
        DivClass(coords)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Greatest common divisor of the coordinates; zero for the zero class.
    pub fn content(&self) -> u64 {
        self.0
            .iter()
            .fold(0u64, |acc, &c| gcd(acc, c.unsigned_abs()))
    }

    /// Splits `self = k * P` with `P` primitive and `k >= 1`.
    ///
    /// Returns `None` for the zero class.
    pub fn primitive_part(&self) -> Option<(i64, DivClass)> {
        let k = self.content();
        if k == 0 {
            return None;
        }
        let k = i64::try_from(k).ok()?;
        Some((k, DivClass(self.0.iter().map(|&c| c / k).collect())))
    }

    pub fn sum<'a, I>(rank: usize, parts: I) -> DivClass
    where
        I: IntoIterator<Item = &'a DivClass>,
    {
        parts
            .into_iter()
            .fold(DivClass::zero(rank), |acc, d| &acc + d)
    }
}

impl fmt::Display for DivClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn zip_with(a: &DivClass, b: &DivClass, op: impl Fn(i64, i64) -> i64) -> DivClass {
    assert_eq!(a.rank(), b.rank(), "divisor classes of different rank");
    DivClass(a.0.iter().zip(&b.0).map(|(&x, &y)| op(x, y)).collect())
}

impl Add for &DivClass {
    type Output = DivClass;
    fn add(self, rhs: &DivClass) -> DivClass {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Add for DivClass {
    type Output = DivClass;
    fn add(self, rhs: DivClass) -> DivClass {
        &self + &rhs
    }
}

impl Sub for &DivClass {
    type Output = DivClass;
    fn sub(self, rhs: &DivClass) -> DivClass {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Sub for DivClass {
    type Output = DivClass;
    fn sub(self, rhs: DivClass) -> DivClass {
        &self - &rhs
    }
}

impl Neg for &DivClass {
    type Output = DivClass;
    fn neg(self) -> DivClass {
        DivClass(self.0.iter().map(|&c| -c).collect())
    }
}

impl Neg for DivClass {
    type Output = DivClass;
    fn neg(self) -> DivClass {
        -&self
    }
}

impl Mul<&DivClass> for i64 {
    type Output = DivClass;
    fn mul(self, rhs: &DivClass) -> DivClass {
        DivClass(rhs.0.iter().map(|&c| self * c).collect())
    }
}

impl Mul<DivClass> for i64 {
    type Output = DivClass;
    fn mul(self, rhs: DivClass) -> DivClass {
        self * &rhs
    }
}

/// A symmetric, even integer bilinear form on `Z^rank`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramLattice {
    rank: usize,
    gram: Vec<i64>,
}

impl GramLattice {
    /// Builds a lattice from its Gram matrix, checking squareness, symmetry
    /// and that the diagonal is even.
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let rank = rows.len();
        if rank == 0 {
            return Err(Error::InvalidLattice("rank must be positive".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != rank {
                return Err(Error::InvalidLattice(format!(
                    "row {i} has length {}, expected {rank}",
                    row.len()
                )));
            }
        }
        for i in 0..rank {
            if rows[i][i] % 2 != 0 {
                return Err(Error::InvalidLattice(format!(
                    "odd diagonal entry gram[{i}][{i}] = {}",
                    rows[i][i]
                )));
            }
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::InvalidLattice(format!(
                        "not symmetric: gram[{i}][{j}] = {} but gram[{j}][{i}] = {}",
                        rows[i][j], rows[j][i]
                    )));
                }
            }
        }
        Ok(GramLattice {
            rank,
            gram: rows.into_iter().flatten().collect(),
        })
    }

    /// The hyperbolic plane `U` with basis `e, f`, `e² = f² = 0`, `e·f = 1`.
    pub fn hyperbolic_plane() -> Self {
        GramLattice::new(vec![vec![0, 1], vec![1, 0]]).expect("U is valid")
    }

    /// The rank-one lattice `Z·H` with `H² = degree`.
    pub fn rank_one(degree: i64) -> Result<Self> {
        GramLattice::new(vec![vec![degree]])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.gram[i * self.rank + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.gram.chunks(self.rank).map(<[i64]>::to_vec).collect()
    }

    pub fn check_dim(&self, d: &DivClass) -> Result<()> {
        if d.rank() == self.rank {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.rank,
                found: d.rank(),
            })
        }
    }

    /// The intersection number `D·E = Dᵀ G E`.
    pub fn intersect(&self, d: &DivClass, e: &DivClass) -> Result<i64> {
        self.check_dim(d)?;
        self.check_dim(e)?;
        let mut acc: i128 = 0;
        for (i, &di) in d.coords().iter().enumerate() {
            if di == 0 {
                continue;
            }
            let mut row: i128 = 0;
            for (j, &ej) in e.coords().iter().enumerate() {
                row += i128::from(self.entry(i, j)) * i128::from(ej);
            }
            acc = acc
                .checked_add(i128::from(di).checked_mul(row).ok_or(Error::Overflow("D·E"))?)
                .ok_or(Error::Overflow("D·E"))?;
        }
        i64::try_from(acc).map_err(|_| Error::Overflow("D·E"))
    }

    pub fn square(&self, d: &DivClass) -> Result<i64> {
        self.intersect(d, d)
    }

    /// Euler characteristic of a line bundle on a K3 surface, `χ(D) = D²/2 + 2`.
    pub fn chi(&self, d: &DivClass) -> Result<i64> {
        Ok(self.square(d)? / 2 + 2)
    }

    /// Arithmetic genus of a curve in `|H|`, `g = H²/2 + 1`.
    pub fn genus(&self, h: &DivClass) -> Result<i64> {
        Ok(self.square(h)? / 2 + 1)
    }

    /// Hodge-index sanity check.
    ///
    /// On a Picard lattice of signature `(1, ρ-1)` every plane spanned by `H`
    /// (with `H² > 0`) and another class is hyperbolic or degenerate, i.e.
    /// `H²·D² - (H·D)² <= 0`. This samples the basis vectors plus `samples`
    /// random classes and returns one warning per plane that is positive
    /// definite. An empty list is not a proof of the signature.
    pub fn hodge_index_warnings(&self, h: &DivClass, samples: usize, seed: u64) -> Result<Vec<String>> {
        let h2 = i128::from(self.square(h)?);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut candidates: Vec<DivClass> = (0..self.rank).map(|i| DivClass::basis(self.rank, i)).collect();
        candidates.extend((0..samples).map(|_| {
            DivClass::new((0..self.rank).map(|_| rng.gen_range(-3..=3)).collect())
        }));
        let mut warnings = Vec::new();
        for d in candidates {
            let hd = i128::from(self.intersect(h, &d)?);
            let d2 = i128::from(self.square(&d)?);
            if h2 * d2 - hd * hd > 0 {
                warnings.push(format!(
                    "the plane spanned by H and {d} is positive definite; the form cannot have signature (1, rank-1)"
                ));
            }
        }
        Ok(warnings)
    }
}

/// A big class `H` (`H² > 0`) whose nefness is asserted by the caller.
///
/// Nefness is only checked against a declared root set, see
/// [`crate::divisor::RootSet`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiPolarization {
    class: DivClass,
    square: i64,
    asserts_nef: bool,
}

impl QuasiPolarization {
    pub fn new(lattice: &GramLattice, class: DivClass) -> Result<Self> {
        Self::with_nef_assertion(lattice, class, true)
    }

    pub fn with_nef_assertion(lattice: &GramLattice, class: DivClass, asserts_nef: bool) -> Result<Self> {
        let square = lattice.square(&class)?;
        if square <= 0 {
            return Err(Error::NotBig { square });
        }
        Ok(QuasiPolarization {
            class,
            square,
            asserts_nef,
        })
    }

    pub fn class(&self) -> &DivClass {
        &self.class
    }

    pub fn square(&self) -> i64 {
        self.square
    }

    pub fn genus(&self) -> i64 {
        self.square / 2 + 1
    }

    pub fn asserts_nef(&self) -> bool {
        self.asserts_nef
    }

    /// `D·H`.
    pub fn degree(&self, lattice: &GramLattice, d: &DivClass) -> Result<i64> {
        lattice.intersect(d, &self.class)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e() -> DivClass {
        DivClass::new(vec![1, 0])
    }

    fn f() -> DivClass {
        DivClass::new(vec![0, 1])
    }

    #[test]
    fn hyperbolic_plane_products() {
        let u = GramLattice::hyperbolic_plane();
        assert_eq!(u.intersect(&e(), &f()).unwrap(), 1);
        assert_eq!(u.intersect(&e(), &DivClass::zero(2)).unwrap(), 0);
        let d = &e() + &(3 * &f());
        assert_eq!(u.square(&d).unwrap(), 6);
    }

    #[test]
    fn chi_and_genus() {
        let u = GramLattice::hyperbolic_plane();
        assert_eq!(u.chi(&e()).unwrap(), 2);
        assert_eq!(u.chi(&DivClass::zero(2)).unwrap(), 2);
        assert_eq!(u.chi(&(&e() + &(3 * &f()))).unwrap(), 5);
        assert_eq!(u.genus(&(&e() + &f())).unwrap(), 2);
        assert_eq!(u.genus(&(&e() + &(3 * &f()))).unwrap(), 4);
        let l = GramLattice::rank_one(2).unwrap();
        assert_eq!(l.genus(&DivClass::new(vec![1])).unwrap(), 2);
    }

    #[test]
    fn rejects_bad_gram_matrices() {
        assert!(matches!(GramLattice::new(vec![vec![1]]), Err(Error::InvalidLattice(_))));
        assert!(matches!(
            GramLattice::new(vec![vec![0, 1], vec![2, 0]]),
            Err(Error::InvalidLattice(_))
        ));
        assert!(matches!(GramLattice::new(vec![vec![0, 1]]), Err(Error::InvalidLattice(_))));
        assert!(matches!(GramLattice::new(vec![]), Err(Error::InvalidLattice(_))));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let u = GramLattice::hyperbolic_plane();
        let err = u.intersect(&DivClass::new(vec![1, 0, 0]), &e()).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn overflow_is_reported() {
        let l = GramLattice::rank_one(2).unwrap();
        let big = DivClass::new(vec![i64::MAX / 2]);
        assert_eq!(l.square(&big), Err(Error::Overflow("D·E")));
    }

    #[test]
    fn primitive_part_splits_multiples() {
        let d = DivClass::new(vec![0, -6, 4]);
        let (k, p) = d.primitive_part().unwrap();
        assert_eq!(k, 2);
        assert_eq!(p, DivClass::new(vec![0, -3, 2]));
        assert!(DivClass::zero(3).primitive_part().is_none());
    }

    #[test]
    fn quasi_polarization_requires_positive_square() {
        let u = GramLattice::hyperbolic_plane();
        assert!(QuasiPolarization::new(&u, e()).is_err());
        let h = QuasiPolarization::new(&u, &e() + &f()).unwrap();
        assert_eq!(h.genus(), 2);
    }

    #[test]
    fn hodge_diagnostic() {
        let u = GramLattice::hyperbolic_plane();
        assert!(u.hodge_index_warnings(&(&e() + &f()), 50, 7).unwrap().is_empty());
        // Positive definite: every plane through H is positive definite.
        let a2 = GramLattice::new(vec![vec![2, 1], vec![1, 2]]).unwrap();
        assert!(!a2.hodge_index_warnings(&DivClass::new(vec![1, 0]), 10, 7).unwrap().is_empty());
    }
}
