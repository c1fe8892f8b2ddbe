//! Mukai vectors `v = ⟨r, c₁, s⟩` with `s = χ - r`, and the Mukai pairing.

use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DivClass, GramLattice};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MukaiVector {
    pub r: i64,
    pub c1: DivClass,
    pub s: i64,
}

impl MukaiVector {
    pub fn new(r: i64, c1: DivClass, s: i64) -> Self {
        MukaiVector { r, c1, s }
    }

    /// `v(O_X) = ⟨1, 0, 1⟩`.
    pub fn structure_sheaf(rank: usize) -> Self {
        MukaiVector::new(1, DivClass::zero(rank), 1)
    }

    /// `(v, w) = c₁(v)·c₁(w) - r(v)s(w) - r(w)s(v)`.
    pub fn pairing(&self, lattice: &GramLattice, other: &MukaiVector) -> Result<i64> {
        let cc = i128::from(lattice.intersect(&self.c1, &other.c1)?);
        let value = cc - i128::from(self.r) * i128::from(other.s) - i128::from(other.r) * i128::from(self.s);
        i64::try_from(value).map_err(|_| Error::Overflow("Mukai pairing"))
    }

    /// The numerical constraint satisfied by every simple sheaf:
    /// `r·s <= c₁²/2 + 1`, equivalently `(v, v) >= -2`.
    pub fn simple_bound_holds(&self, lattice: &GramLattice) -> Result<bool> {
        let c2 = i128::from(lattice.square(&self.c1)?);
        Ok(i128::from(self.r) * i128::from(self.s) <= c2 / 2 + 1)
    }
}

impl Add for &MukaiVector {
    type Output = MukaiVector;
    fn add(self, rhs: &MukaiVector) -> MukaiVector {
        MukaiVector::new(self.r + rhs.r, &self.c1 + &rhs.c1, self.s + rhs.s)
    }
}
