//! Numeric shadows of decompositions `H = D₁ + … + Dₙ` and the certificates
//! built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DivClass, GramLattice};

/// Entries of a profile are kept below this magnitude so that every
/// polynomial expression evaluated on them fits comfortably in `i64`.
pub const PROFILE_ENTRY_LIMIT: i64 = 1 << 28;

/// The squares `Dᵢ²` and products `Dᵢ·Dⱼ` of a decomposition of `H`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct DecompositionProfile {
    sq: Vec<i64>,
    x: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    sq: Vec<i64>,
    x: Vec<Vec<i64>>,
}

impl TryFrom<RawProfile> for DecompositionProfile {
    type Error = Error;
    fn try_from(raw: RawProfile) -> Result<Self> {
        DecompositionProfile::new(raw.sq, raw.x)
    }
}

impl From<DecompositionProfile> for RawProfile {
    fn from(p: DecompositionProfile) -> Self {
        RawProfile { sq: p.sq, x: p.x }
    }
}

impl DecompositionProfile {
    pub fn new(sq: Vec<i64>, x: Vec<Vec<i64>>) -> Result<Self> {
        let n = sq.len();
        if n < 2 {
            return Err(Error::InvalidProfile(format!("need at least two parts, got {n}")));
        }
        if x.len() != n || x.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidProfile(format!("product matrix must be {n}×{n}")));
        }
        for (i, &s) in sq.iter().enumerate() {
            if s % 2 != 0 {
                return Err(Error::InvalidProfile(format!("D{}² = {s} is odd", i + 1)));
            }
            if s.abs() > PROFILE_ENTRY_LIMIT {
                return Err(Error::InvalidProfile(format!("D{}² = {s} exceeds the entry limit", i + 1)));
            }
        }
        for i in 0..n {
            if x[i][i] != 0 {
                return Err(Error::InvalidProfile("product matrix must have zero diagonal".into()));
            }
            for j in 0..n {
                if x[i][j] != x[j][i] {
                    return Err(Error::InvalidProfile(format!(
                        "product matrix not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                if x[i][j].abs() > PROFILE_ENTRY_LIMIT {
                    return Err(Error::InvalidProfile("product exceeds the entry limit".into()));
                }
            }
        }
        Ok(DecompositionProfile { sq, x })
    }

    /// Builds a profile from the strict upper triangle of the product
    /// matrix, listed row by row: `x₁₂, x₁₃, …, x₁ₙ, x₂₃, …`.
    pub fn from_upper(sq: Vec<i64>, upper: &[i64]) -> Result<Self> {
        let n = sq.len();
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::InvalidProfile(format!(
                "expected {} upper-triangular products, got {}",
                n * n.saturating_sub(1) / 2,
                upper.len()
            )));
        }
        let mut x = vec![vec![0; n]; n];
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = *it.next().expect("length checked");
                x[i][j] = v;
                x[j][i] = v;
            }
        }
        DecompositionProfile::new(sq, x)
    }

    pub fn from_classes(lattice: &GramLattice, parts: &[DivClass]) -> Result<Self> {
        let n = parts.len();
        let mut sq = Vec::with_capacity(n);
        let mut x = vec![vec![0; n]; n];
        for i in 0..n {
            sq.push(lattice.square(&parts[i])?);
            for j in i + 1..n {
                let v = lattice.intersect(&parts[i], &parts[j])?;
                x[i][j] = v;
                x[j][i] = v;
            }
        }
        DecompositionProfile::new(sq, x)
    }

    pub fn n(&self) -> usize {
        self.sq.len()
    }

    pub fn squares(&self) -> &[i64] {
        &self.sq
    }

    pub fn square(&self, i: usize) -> i64 {
        self.sq[i]
    }

    pub fn product(&self, i: usize, j: usize) -> i64 {
        self.x[i][j]
    }

    pub fn products(&self) -> &[Vec<i64>] {
        &self.x
    }

    /// `(Σ_{i∈I} Dᵢ)²`.
    pub fn group_square(&self, group: &[usize]) -> i64 {
        let mut total = 0;
        for (k, &i) in group.iter().enumerate() {
            total += self.sq[i];
            for &j in &group[k + 1..] {
                total += 2 * self.x[i][j];
            }
        }
        total
    }

    /// `(Σ_{i∈I} Dᵢ)·(Σ_{j∈J} Dⱼ)` for disjoint `I`, `J`.
    pub fn cross(&self, left: &[usize], right: &[usize]) -> i64 {
        left.iter()
            .map(|&i| right.iter().map(|&j| self.x[i][j]).sum::<i64>())
            .sum()
    }

    pub fn h_square(&self) -> i64 {
        let all: Vec<usize> = (0..self.n()).collect();
        self.group_square(&all)
    }

    pub fn genus(&self) -> i64 {
        self.h_square() / 2 + 1
    }

    pub fn chi(&self, group: &[usize]) -> i64 {
        self.group_square(group) / 2 + 2
    }

    pub fn complement(&self, group: &[usize]) -> Vec<usize> {
        (0..self.n()).filter(|i| !group.contains(i)).collect()
    }

    /// Numerical 2-connectedness: `(Σ_I D)·(Σ_{Iᶜ} D) >= 2` for every
    /// nonempty proper subset `I`.
    pub fn is_two_connected(&self) -> bool {
        self.two_connectedness_violation().is_none()
    }

    /// The first subset (containing part 1) whose cut is below 2.
    pub fn two_connectedness_violation(&self) -> Option<Vec<usize>> {
        proper_splits(self.n()).find(|group| {
            let rest = self.complement(group);
            self.cross(group, &rest) < 2
        })
    }

    /// Merges parts: part `k` of the result is the sum of the parts listed
    /// in `groups[k]`. The groups must partition `0..n`.
    pub fn grouped(&self, groups: &[Vec<usize>]) -> Result<DecompositionProfile> {
        let mut seen = vec![false; self.n()];
        for &i in groups.iter().flatten() {
            if i >= self.n() || seen[i] {
                return Err(Error::InvalidProfile("groups must partition the parts".into()));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) || groups.iter().any(Vec::is_empty) {
            return Err(Error::InvalidProfile("groups must partition the parts".into()));
        }
        let k = groups.len();
        let sq = groups.iter().map(|g| self.group_square(g)).collect();
        let mut x = vec![vec![0; k]; k];
        for a in 0..k {
            for b in a + 1..k {
                let v = self.cross(&groups[a], &groups[b]);
                x[a][b] = v;
                x[b][a] = v;
            }
        }
        DecompositionProfile::new(sq, x)
    }

    /// The profile of `D_{order[0]}, D_{order[1]}, …`.
    pub fn permuted(&self, order: &[usize]) -> Result<DecompositionProfile> {
        let groups: Vec<Vec<usize>> = order.iter().map(|&i| vec![i]).collect();
        self.grouped(&groups)
    }
}

/// Nonempty proper subsets of `0..n` that contain `0`, as sorted index lists.
/// Each 2-partition of `0..n` appears exactly once.
pub fn proper_splits(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let count = if n == 0 { 0u64 } else { 1u64 << (n - 1) };
    (0..count).filter_map(move |mask| {
        // bit k of mask says whether part k + 1 joins part 0
        let group: Vec<usize> = std::iter::once(0)
            .chain((1..n).filter(|&i| mask & (1 << (i - 1)) != 0))
            .collect();
        (group.len() < n).then_some(group)
    })
}

/// Which argument produced a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SketchRule {
    /// `(D₁·D₂)(D₃²/2 + 1) >= D₁·D₃ + D₂·D₃`.
    PairingDominates,
    /// `D₂·D₃ <= 2 + (D₁² + D₂² + D₃²)/2`.
    SmallOppositeProduct,
    /// Four parts with `D₂·D₃ <= D₂·D₄ <= D₃·D₄ <= 1`.
    LowIntersectionsOfFour,
    /// `H = nE + D` with `E` elliptic.
    EllipticMultiple,
    /// `χ(H - Dᵢ)χ(Dᵢ) > g`, forced by the determinant inequality in the
    /// three-part cases.
    SinglePartVersusRest,
    /// First 2-partition found by exhaustive search over all groupings.
    PartitionSearch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SketchPart {
    /// Indices (0-based) into the profile the sketch was built from.
    Indices(Vec<usize>),
    Named(String),
}

/// A claim `h⁰(L)·h⁰(R) >= χ(L)·χ(R) > g` for `H = L + R`, carrying every
/// number it depends on so it can be re-checked from scratch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateSketch {
    pub rule: SketchRule,
    pub left: SketchPart,
    pub right: SketchPart,
    pub left_square: i64,
    pub right_square: i64,
    pub cross: i64,
    pub left_chi: i64,
    pub right_chi: i64,
    pub genus: i64,
    /// Renumbering of the input parts under which the rule applied, when
    /// the rule was tried under several orderings.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ordering: Option<Vec<usize>>,
}

impl CertificateSketch {
    pub fn from_squares(rule: SketchRule, left: SketchPart, right: SketchPart, left_square: i64, right_square: i64, cross: i64) -> Self {
        CertificateSketch {
            rule,
            left,
            right,
            left_square,
            right_square,
            cross,
            left_chi: left_square / 2 + 2,
            right_chi: right_square / 2 + 2,
            genus: (left_square + 2 * cross + right_square) / 2 + 1,
            ordering: None,
        }
    }

    pub fn from_split(profile: &DecompositionProfile, group: &[usize], rule: SketchRule) -> Self {
        let mut left = group.to_vec();
        left.sort_unstable();
        let right = profile.complement(&left);
        let (ls, rs, c) = (profile.group_square(&left), profile.group_square(&right), profile.cross(&left, &right));
        CertificateSketch::from_squares(rule, SketchPart::Indices(left), SketchPart::Indices(right), ls, rs, c)
    }

    pub fn with_ordering(mut self, ordering: Vec<usize>) -> Self {
        self.ordering = Some(ordering);
        self
    }

    /// `max(χ(L), 0)·max(χ(R), 0)`; both factors are lower bounds for `h⁰`
    /// of effective classes.
    pub fn bound_product(&self) -> i64 {
        self.left_chi.max(0) * self.right_chi.max(0)
    }

    /// Recomputes every stored number and the strict inequality.
    pub fn verify(&self) -> Result<()> {
        let fresh = CertificateSketch::from_squares(
            self.rule,
            self.left.clone(),
            self.right.clone(),
            self.left_square,
            self.right_square,
            self.cross,
        );
        if fresh.left_chi != self.left_chi || fresh.right_chi != self.right_chi || fresh.genus != self.genus {
            return Err(Error::Precondition("certificate numbers do not recompute".into()));
        }
        if self.bound_product() <= self.genus {
            return Err(Error::Precondition(format!(
                "certificate inequality fails: {}·{} <= {}",
                self.left_chi, self.right_chi, self.genus
            )));
        }
        Ok(())
    }

    /// [`verify`](Self::verify), plus: the index groups partition the
    /// profile and the stored squares are its own.
    pub fn verify_against(&self, profile: &DecompositionProfile) -> Result<()> {
        self.verify()?;
        let (SketchPart::Indices(left), SketchPart::Indices(right)) = (&self.left, &self.right) else {
            return Err(Error::Precondition("sketch is not expressed in profile indices".into()));
        };
        let mut all: Vec<usize> = left.iter().chain(right).copied().collect();
        all.sort_unstable();
        if left.is_empty() || right.is_empty() || all != (0..profile.n()).collect::<Vec<_>>() {
            return Err(Error::Precondition("sketch groups do not partition the parts".into()));
        }
        if profile.group_square(left) != self.left_square
            || profile.group_square(right) != self.right_square
            || profile.cross(left, right) != self.cross
        {
            return Err(Error::Precondition("sketch squares disagree with the profile".into()));
        }
        Ok(())
    }

    /// Re-expresses a sketch built on a grouped profile in terms of the
    /// original parts.
    pub(crate) fn ungroup(mut self, groups: &[Vec<usize>]) -> Self {
        let lift = |part: SketchPart| match part {
            SketchPart::Indices(idx) => {
                let mut out: Vec<usize> = idx.iter().flat_map(|&k| groups[k].iter().copied()).collect();
                out.sort_unstable();
                SketchPart::Indices(out)
            }
            named => named,
        };
        self.left = lift(self.left);
        self.right = lift(self.right);
        self.ordering = Some(groups.iter().flatten().copied().collect());
        self
    }
}

/// First 2-partition whose `χ·χ` exceeds `g`, scanning [`proper_splits`]
/// in order.
pub fn partition_certificate(profile: &DecompositionProfile) -> Option<CertificateSketch> {
    proper_splits(profile.n())
        .map(|group| CertificateSketch::from_split(profile, &group, SketchRule::PartitionSearch))
        .find(|sketch| sketch.verify().is_ok())
}

fn require_nonnegative_squares(profile: &DecompositionProfile) -> Result<()> {
    if let Some(i) = profile.squares().iter().position(|&s| s < 0) {
        return Err(Error::InvalidProfile(format!(
            "D{}² = {} is negative",
            i + 1,
            profile.square(i)
        )));
    }
    Ok(())
}

/// Three-part criterion: if
/// `(D₁·D₂)(D₃²/2 + 1) >= D₁·D₃ + D₂·D₃` or
/// `D₂·D₃ <= 2 + (D₁² + D₂² + D₃²)/2`,
/// then a split of the form `χ(Dᵢ + Dⱼ)χ(Dₖ) > g` exists.
///
/// The parts are taken as numbered, except that `D₂` and `D₃` may be
/// exchanged for the second condition (so that `D₁·D₂ >= D₁·D₃`). Use
/// [`no_negative_intersections_any_order`] to try every numbering.
///
/// Returns `Err(InconsistentGeometricData)` when the second condition holds
/// but the promised inequality fails, which can only happen when the
/// profile is not numerically 2-connected.
pub fn no_negative_intersections(profile: &DecompositionProfile) -> Result<Option<CertificateSketch>> {
    if profile.n() != 3 {
        return Err(Error::InvalidProfile(format!("expected three parts, got {}", profile.n())));
    }
    require_nonnegative_squares(profile)?;
    let (x12, x13, x23) = (profile.product(0, 1), profile.product(0, 2), profile.product(1, 2));
    let a3 = profile.square(2) / 2 + 1;
    if x12 * a3 >= x13 + x23 {
        let sketch = CertificateSketch::from_split(profile, &[0, 1], SketchRule::PairingDominates);
        sketch.verify()?;
        return Ok(Some(sketch));
    }
    let half_sum = (profile.square(0) + profile.square(1) + profile.square(2)) / 2;
    if x23 <= 2 + half_sum {
        let group: &[usize] = if x12 >= x13 { &[0, 1] } else { &[0, 2] };
        let sketch = CertificateSketch::from_split(profile, group, SketchRule::SmallOppositeProduct);
        if sketch.verify().is_err() {
            return Err(Error::InconsistentGeometricData(format!(
                "D2·D3 = {x23} is small but the split fails; the profile is not numerically 2-connected"
            )));
        }
        return Ok(Some(sketch));
    }
    Ok(None)
}

const ORDERS_OF_THREE: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// [`no_negative_intersections`] under every numbering of the three parts;
/// the returned sketch records the numbering that worked.
pub fn no_negative_intersections_any_order(profile: &DecompositionProfile) -> Result<Option<CertificateSketch>> {
    if profile.n() != 3 {
        return Err(Error::InvalidProfile(format!("expected three parts, got {}", profile.n())));
    }
    require_nonnegative_squares(profile)?;
    for order in ORDERS_OF_THREE {
        let groups: Vec<Vec<usize>> = order.iter().map(|&i| vec![i]).collect();
        let permuted = profile.grouped(&groups)?;
        match no_negative_intersections(&permuted) {
            Ok(Some(sketch)) => return Ok(Some(sketch.ungroup(&groups))),
            Ok(None) | Err(Error::InconsistentGeometricData(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// `H = nE + D` with `E² = 0`, given `n`, `E·D` and `D²`.
///
/// For `n >= 2` and `D² >= 0` the certificate is `h⁰(E)·h⁰((n-1)E + D)`
/// with `h⁰(E) = 2 = χ(E)`. For `n >= 4` the class `D` is first replaced
/// by `H - 2E`, whose square `H·(H - 4E)` is nonnegative because `H` is nef.
pub fn elliptic_multiple(n: i64, e_dot_d: i64, d_square: i64) -> Result<Option<CertificateSketch>> {
    if e_dot_d < 0 {
        return Err(Error::InvalidArgument(format!(
            "E·D = {e_dot_d} < 0, but an elliptic pencil has no fixed components"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidArgument(format!("multiplicity n = {n} must be positive")));
    }
    if d_square % 2 != 0 || d_square.abs() > PROFILE_ENTRY_LIMIT || n > PROFILE_ENTRY_LIMIT || e_dot_d > PROFILE_ENTRY_LIMIT {
        return Err(Error::InvalidArgument("D² must be even and all inputs within the entry limit".into()));
    }
    let (n, d_square) = if n >= 4 {
        let h_square = d_square + 2 * n * e_dot_d;
        let reduced = h_square - 4 * e_dot_d;
        if reduced < 0 {
            return Err(Error::InconsistentGeometricData(format!(
                "(H - 2E)² = {reduced} < 0 contradicts nefness of H"
            )));
        }
        // H = 2E + D' with D' = (n - 2)E + D
        (2, reduced)
    } else if n >= 2 && d_square >= 0 {
        (n, d_square)
    } else {
        return Ok(None);
    };
    let right_square = d_square + 2 * (n - 1) * e_dot_d;
    let sketch = CertificateSketch::from_squares(
        SketchRule::EllipticMultiple,
        SketchPart::Named("E".into()),
        SketchPart::Named(format!("{}E + D", n - 1)),
        0,
        right_square,
        e_dot_d,
    );
    sketch.verify()?;
    Ok(Some(sketch))
}

/// Four parts with nonnegative squares whose last three meet pairwise at
/// most once. After sorting parts 2, 3, 4 so that
/// `D₂·D₃ <= D₂·D₄ <= D₃·D₄`, the grouping `(D₁ + D₄) + D₂ + D₃` satisfies
/// the small-product condition of [`no_negative_intersections`].
///
/// Returns `Ok(None)` when the three products are not all `<= 1`.
pub fn n4_low_intersections(profile: &DecompositionProfile) -> Result<Option<CertificateSketch>> {
    if profile.n() != 4 {
        return Err(Error::InvalidProfile(format!("expected four parts, got {}", profile.n())));
    }
    require_nonnegative_squares(profile)?;
    let Some([a, b, c]) = sort_by_products(profile, [1, 2, 3]) else {
        unreachable!("some ordering of three products is sorted");
    };
    if profile.product(b, c) > 1 {
        return Ok(None);
    }
    if let Some(bad) = profile.two_connectedness_violation() {
        return Err(Error::InconsistentGeometricData(format!(
            "profile is not numerically 2-connected (cut at parts {:?})",
            bad.iter().map(|i| i + 1).collect::<Vec<_>>()
        )));
    }
    let groups = vec![vec![0, c], vec![a], vec![b]];
    let grouped = profile.grouped(&groups)?;
    Ok(no_negative_intersections(&grouped)?.map(|s| {
        let mut s = s.ungroup(&groups);
        s.rule = SketchRule::LowIntersectionsOfFour;
        s.ordering = Some(vec![0, a, b, c]);
        s
    }))
}

/// The first ordering `(a, b, c)` of the given indices with
/// `x_ab <= x_ac <= x_bc`.
pub(crate) fn sort_by_products(profile: &DecompositionProfile, idx: [usize; 3]) -> Option<[usize; 3]> {
    ORDERS_OF_THREE.iter().find_map(|o| {
        let (a, b, c) = (idx[o[0]], idx[o[1]], idx[o[2]]);
        (profile.product(a, b) <= profile.product(a, c) && profile.product(a, c) <= profile.product(b, c)).then_some([a, b, c])
    })
}
