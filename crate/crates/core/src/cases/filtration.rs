//! Integer shadows of harmonic filtrations of a Lazarsfeld bundle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The data `(rᵢ, sᵢ, εᵢ)` of one graded piece: its Mukai vector is
/// `⟨rᵢ, -Dᵢ, sᵢ⟩` and `εᵢ = D̄ᵢ²/2` after fixed-component reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiltrationEntry {
    pub r: i64,
    pub s: i64,
    pub eps: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<FiltrationEntry>", into = "Vec<FiltrationEntry>")]
pub struct FiltrationProfile {
    entries: Vec<FiltrationEntry>,
}

impl TryFrom<Vec<FiltrationEntry>> for FiltrationProfile {
    type Error = Error;
    fn try_from(entries: Vec<FiltrationEntry>) -> Result<Self> {
        FiltrationProfile::new(entries)
    }
}

impl From<FiltrationProfile> for Vec<FiltrationEntry> {
    fn from(p: FiltrationProfile) -> Self {
        p.entries
    }
}

impl FiltrationProfile {
    pub fn new(entries: Vec<FiltrationEntry>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidProfile(format!("a filtration profile needs n >= 2 entries, got {}", entries.len())));
        }
        for (i, e) in entries.iter().enumerate() {
            if e.r < 1 {
                return Err(Error::InvalidProfile(format!("r{} = {} must be at least 1", i + 1, e.r)));
            }
            if e.eps < 0 {
                return Err(Error::InvalidProfile(format!("eps{} = {} must be nonnegative", i + 1, e.eps)));
            }
        }
        Ok(FiltrationProfile { entries })
    }

    /// Builds a profile from `(r, s, eps)` triples.
    pub fn from_triples(triples: &[(i64, i64, i64)]) -> Result<Self> {
        FiltrationProfile::new(triples.iter().map(|&(r, s, eps)| FiltrationEntry { r, s, eps }).collect())
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[FiltrationEntry] {
        &self.entries
    }

    /// `h⁰(A) = Σ rᵢ`.
    pub fn h0_total(&self) -> i64 {
        self.entries.iter().map(|e| e.r).sum()
    }

    /// `h¹(A) = Σ sᵢ`.
    pub fn h1_total(&self) -> i64 {
        self.entries.iter().map(|e| e.s).sum()
    }

    pub fn h0_h1(&self) -> i64 {
        self.h0_total() * self.h1_total()
    }
}

/// The constraints every harmonic filtration satisfies:
/// `rᵢsᵢ <= εᵢ + 1`, `rᵢ <= rᵢ₊₁ + … + rₙ` for `i < n`, and `sₙ >= 1`.
pub fn profile_feasible(fp: &FiltrationProfile) -> bool {
    let e = fp.entries();
    let simple = e.iter().all(|x| x.r * x.s <= x.eps + 1);
    let mut tail = 0;
    let mut ranks = true;
    for x in e.iter().rev() {
        if tail > 0 && x.r > tail {
            ranks = false;
        }
        tail += x.r;
    }
    simple && ranks && e.last().is_some_and(|x| x.s >= 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(t: &[(i64, i64, i64)]) -> FiltrationProfile {
        FiltrationProfile::from_triples(t).unwrap()
    }

    #[test]
    fn feasibility_examples() {
        assert!(profile_feasible(&fp(&[(1, 1, 0), (1, 1, 0)])));
        assert!(!profile_feasible(&fp(&[(2, 1, 0), (1, 1, 0)])));
        assert!(!profile_feasible(&fp(&[(1, 1, 0), (1, 1, 0), (1, 0, 0)])));
        assert!(!profile_feasible(&fp(&[(1, 2, 0), (1, 1, 0)])));
        assert!(profile_feasible(&fp(&[(3, -4, 0), (1, 1, 2), (2, 1, 1)])));
    }

    #[test]
    fn validation() {
        assert!(FiltrationProfile::from_triples(&[(1, 1, 0)]).is_err());
        assert!(FiltrationProfile::from_triples(&[(0, 1, 0), (1, 1, 0)]).is_err());
        assert!(FiltrationProfile::from_triples(&[(1, 1, -1), (1, 1, 0)]).is_err());
    }

    #[test]
    fn totals() {
        let p = fp(&[(1, 2, 1), (2, -1, 0), (3, 1, 2)]);
        assert_eq!((p.h0_total(), p.h1_total(), p.h0_h1()), (6, 2, 12));
    }
}
