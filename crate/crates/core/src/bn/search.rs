//! Lattice-level violation search: decompositions `H = D₁ + D₂` into
//! certified effective classes whose `h⁰` bounds multiply past `g`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divisor::{effectivity_status, h0_lower_bound, RootSet};
use crate::error::{Error, Result};
use crate::lattice::{DivClass, GramLattice, QuasiPolarization};

/// `H = part1 + part2` with `h⁰(partᵢ) >= lbᵢ` and `lb1·lb2 > g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationCertificate {
    pub part1: DivClass,
    pub part2: DivClass,
    pub lb1: i64,
    pub lb2: i64,
    pub g: i64,
}

impl ViolationCertificate {
    /// Recomputes the certificate from the lattice data.
    pub fn verify(&self, lattice: &GramLattice, h: &QuasiPolarization, roots: &RootSet) -> Result<()> {
        if &(&self.part1 + &self.part2) != h.class() {
            return Err(Error::Precondition("certificate parts do not sum to H".into()));
        }
        let lb1 = h0_lower_bound(lattice, h, &self.part1, roots)?;
        let lb2 = h0_lower_bound(lattice, h, &self.part2, roots)?;
        if (lb1, lb2, h.genus()) != (self.lb1, self.lb2, self.g) {
            return Err(Error::Precondition("certificate bounds do not recompute".into()));
        }
        if i128::from(lb1) * i128::from(lb2) <= i128::from(self.g) {
            return Err(Error::Precondition(format!("{lb1}·{lb2} <= g = {}", self.g)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PairVerdict {
    Violation(ViolationCertificate),
    /// The lower bounds do not exceed `g`. This says nothing about the
    /// actual `h⁰` values.
    NoViolationAtBoundLevel { lb1: i64, lb2: i64, g: i64 },
}

pub fn check_pair(
    lattice: &GramLattice,
    h: &QuasiPolarization,
    d1: &DivClass,
    d2: &DivClass,
    roots: &RootSet,
) -> Result<PairVerdict> {
    lattice.check_dim(d1)?;
    lattice.check_dim(d2)?;
    if &(d1 + d2) != h.class() {
        return Err(Error::Precondition(format!("{d1} + {d2} is not H = {}", h.class())));
    }
    let lb1 = h0_lower_bound(lattice, h, d1, roots)?;
    let lb2 = h0_lower_bound(lattice, h, d2, roots)?;
    let g = h.genus();
    Ok(if i128::from(lb1) * i128::from(lb2) > i128::from(g) {
        PairVerdict::Violation(ViolationCertificate { part1: d1.clone(), part2: d2.clone(), lb1, lb2, g })
    } else {
        PairVerdict::NoViolationAtBoundLevel { lb1, lb2, g }
    })
}

/// A decomposition `H = D₁ + (H - D₁)` with both parts certified effective.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub part1: DivClass,
    pub part2: DivClass,
    pub lb1: i64,
    pub lb2: i64,
}

fn check_bound(degree_bound: i64) -> Result<()> {
    if degree_bound <= 0 {
        return Err(Error::InvalidArgument(format!("degree bound must be positive, got {degree_bound}")));
    }
    if degree_bound > 1_000 {
        return Err(Error::InvalidArgument(format!("degree bound {degree_bound} is unreasonably large")));
    }
    Ok(())
}

/// Visits every class in `[-b, b]^rank` whose first coordinate is `first`,
/// in lexicographic order, until `visit` returns `Some`.
fn scan_slice<T>(
    rank: usize,
    first: i64,
    b: i64,
    mut visit: impl FnMut(&DivClass) -> Result<Option<T>>,
) -> Result<Option<T>> {
    let mut coords = vec![-b; rank];
    coords[0] = first;
    loop {
        let d = DivClass::new(coords.clone());
        if let Some(t) = visit(&d)? {
            return Ok(Some(t));
        }
        // odometer over coordinates 1..rank
        let mut k = rank;
        loop {
            if k == 1 {
                return Ok(None);
            }
            k -= 1;
            if coords[k] < b {
                coords[k] += 1;
                break;
            }
            coords[k] = -b;
        }
    }
}

/// `Some((lb1, lb2))` when `D₁` lies in the degree window and both
/// `D₁` and `H - D₁` are certified effective.
fn admissible(lattice: &GramLattice, h: &QuasiPolarization, d1: &DivClass, roots: &RootSet) -> Result<Option<(DivClass, i64, i64)>> {
    let degree = h.degree(lattice, d1)?;
    if degree <= 0 || degree >= h.square() {
        return Ok(None);
    }
    let d2 = h.class() - d1;
    if !effectivity_status(lattice, h, d1, roots)?.is_effective() || !effectivity_status(lattice, h, &d2, roots)?.is_effective() {
        return Ok(None);
    }
    let lb1 = h0_lower_bound(lattice, h, d1, roots)?;
    let lb2 = h0_lower_bound(lattice, h, &d2, roots)?;
    Ok(Some((d2, lb1, lb2)))
}

/// The lexicographically first violation with `|coordinates of D₁| <= bound`.
///
/// `None` means no violation was found in the box, not that `(L, H)` is
/// Brill–Noether general. The box is split along the first coordinate and
/// scanned in parallel on the current rayon pool.
pub fn find_violation(
    lattice: &GramLattice,
    h: &QuasiPolarization,
    roots: &RootSet,
    degree_bound: i64,
) -> Result<Option<ViolationCertificate>> {
    check_bound(degree_bound)?;
    lattice.check_dim(h.class())?;
    let rank = lattice.rank();
    let g = h.genus();
    let found = (-degree_bound..=degree_bound).into_par_iter().find_map_first(|first| {
        scan_slice(rank, first, degree_bound, |d1| {
            Ok(admissible(lattice, h, d1, roots)?.and_then(|(d2, lb1, lb2)| {
                (i128::from(lb1) * i128::from(lb2) > i128::from(g))
                    .then(|| ViolationCertificate { part1: d1.clone(), part2: d2, lb1, lb2, g })
            }))
        })
        .transpose()
    });
    found.transpose()
}

/// Every admissible decomposition in the box, in lexicographic order of `D₁`.
pub fn enumerate_decompositions(
    lattice: &GramLattice,
    h: &QuasiPolarization,
    roots: &RootSet,
    degree_bound: i64,
) -> Result<Vec<Decomposition>> {
    check_bound(degree_bound)?;
    lattice.check_dim(h.class())?;
    let rank = lattice.rank();
    let slices: Vec<Vec<Decomposition>> = (-degree_bound..=degree_bound)
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            scan_slice(rank, first, degree_bound, |d1| {
                if let Some((d2, lb1, lb2)) = admissible(lattice, h, d1, roots)? {
                    out.push(Decomposition { part1: d1.clone(), part2: d2, lb1, lb2 });
                }
                Ok(None::<()>)
            })?;
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(slices.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u_with(k: i64) -> (GramLattice, QuasiPolarization) {
        let u = GramLattice::hyperbolic_plane();
        let h = QuasiPolarization::new(&u, DivClass::new(vec![1, k])).unwrap();
        (u, h)
    }

    #[test]
    fn check_pair_examples() {
        let (u, h) = u_with(1);
        let e = DivClass::basis(2, 0);
        let f = DivClass::basis(2, 1);
        let PairVerdict::Violation(c) = check_pair(&u, &h, &e, &f, &RootSet::empty()).unwrap() else {
            panic!("expected a violation");
        };
        assert_eq!((c.lb1, c.lb2, c.g), (2, 2, 2));
        c.verify(&u, &h, &RootSet::empty()).unwrap();

        let (u, h) = u_with(3);
        let PairVerdict::Violation(c) = check_pair(&u, &h, &e, &(3 * &f), &RootSet::empty()).unwrap() else {
            panic!("expected a violation");
        };
        assert_eq!((c.lb1, c.lb2, c.g), (2, 4, 4));
        assert!(check_pair(&u, &h, &e, &f, &RootSet::empty()).is_err());
    }

    #[test]
    fn find_violation_examples() {
        let (u, h) = u_with(1);
        let c = find_violation(&u, &h, &RootSet::empty(), 5).unwrap().unwrap();
        assert_eq!((c.lb1, c.lb2, c.g), (2, 2, 2));
        c.verify(&u, &h, &RootSet::empty()).unwrap();
        for deg in [2, 4] {
            let l = GramLattice::rank_one(deg).unwrap();
            let h = QuasiPolarization::new(&l, DivClass::new(vec![1])).unwrap();
            assert_eq!(find_violation(&l, &h, &RootSet::empty(), 5).unwrap(), None);
        }
        assert!(find_violation(&u, &h, &RootSet::empty(), 0).is_err());
    }

    #[test]
    fn search_is_deterministic() {
        let (u, h) = u_with(4);
        let a = find_violation(&u, &h, &RootSet::empty(), 6).unwrap();
        let b = find_violation(&u, &h, &RootSet::empty(), 6).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.unwrap().part1, DivClass::new(vec![0, 1]));
    }

    #[test]
    fn decompositions_are_complementary() {
        let (u, h) = u_with(2);
        let all = enumerate_decompositions(&u, &h, &RootSet::empty(), 4).unwrap();
        assert!(!all.is_empty());
        for d in &all {
            assert_eq!(&(&d.part1 + &d.part2), h.class());
            assert!(all.iter().any(|o| o.part1 == d.part2));
        }
    }
}
