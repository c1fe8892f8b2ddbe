//! Effectivity certificates, `h⁰` lower bounds, fixed-component
//! redistribution and the two-divisor dichotomy.
//!
//! Every answer here is one-sided: an `Effective` verdict carries a reason
//! that is valid on any K3 surface with the given Picard lattice, a
//! `NotEffective` verdict carries an obstruction, and everything else is
//! reported as `Unknown`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{DivClass, GramLattice, QuasiPolarization};

/// Default cap on each root coefficient in the cone-membership search.
pub const DEFAULT_CONE_BOUND: u32 = 10;

/// Classes declared to be irreducible `(-2)`-curves.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootSet {
    roots: Vec<DivClass>,
}

impl RootSet {
    pub fn empty() -> Self {
        RootSet::default()
    }

    /// Checks `R² = -2` and `R·H >= 0` for every declared root.
    pub fn new(lattice: &GramLattice, h: &QuasiPolarization, roots: Vec<DivClass>) -> Result<Self> {
        for (index, r) in roots.iter().enumerate() {
            let square = lattice.square(r)?;
            if square != -2 {
                return Err(Error::InvalidRoot {
                    index,
                    reason: format!("R² = {square}, expected -2"),
                });
            }
            let degree = h.degree(lattice, r)?;
            if degree < 0 {
                return Err(Error::InvalidRoot {
                    index,
                    reason: format!("R·H = {degree} < 0 contradicts nefness of H"),
                });
            }
        }
        Ok(RootSet { roots })
    }

    pub fn roots(&self) -> &[DivClass] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Effectivity {
    Effective,
    NotEffective,
    Unknown,
}

/// Why a verdict was reached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EffectivityWitness {
    /// `D² >= -2` and `D·H > 0`: Riemann–Roch gives `h⁰(D) + h⁰(-D) >= χ(D) >= 1`
    /// and `-D` has negative degree.
    RiemannRoch { square: i64, degree: i64 },
    /// `D = Σ cᵢRᵢ + rest` with `rest` zero or certified by Riemann–Roch.
    RootCombination { coefficients: Vec<u32>, remainder: DivClass },
    ZeroClass,
    NegativeDegree { degree: i64 },
    /// `D·H = 0` but `D` is not a combination of `H`-orthogonal roots with
    /// coefficients up to `bound`.
    NoOrthogonalRootCombination { bound: u32 },
    /// Positive degree and `D² < -2` with no root decomposition found.
    Undecided { square: i64, degree: i64, bound: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EffectivityVerdict {
    pub status: Effectivity,
    pub witness: EffectivityWitness,
}

impl EffectivityVerdict {
    pub fn is_effective(&self) -> bool {
        self.status == Effectivity::Effective
    }
}

fn riemann_roch_certifies(square: i64, degree: i64) -> bool {
    degree > 0 && square >= -2
}

pub fn effectivity_status(
    lattice: &GramLattice,
    h: &QuasiPolarization,
    d: &DivClass,
    roots: &RootSet,
) -> Result<EffectivityVerdict> {
    effectivity_status_with_bound(lattice, h, d, roots, DEFAULT_CONE_BOUND)
}

pub fn effectivity_status_with_bound(
    lattice: &GramLattice,
    h: &QuasiPolarization,
    d: &DivClass,
    roots: &RootSet,
    cone_bound: u32,
) -> Result<EffectivityVerdict> {
    lattice.check_dim(d)?;
    let verdict = |status, witness| Ok(EffectivityVerdict { status, witness });
    if d.is_zero() {
        return verdict(Effectivity::NotEffective, EffectivityWitness::ZeroClass);
    }
    let degree = h.degree(lattice, d)?;
    if degree < 0 {
        return verdict(Effectivity::NotEffective, EffectivityWitness::NegativeDegree { degree });
    }
    let square = lattice.square(d)?;
    if riemann_roch_certifies(square, degree) {
        return verdict(Effectivity::Effective, EffectivityWitness::RiemannRoch { square, degree });
    }
    if let Some((coefficients, remainder)) = root_combination(lattice, h, d, roots, cone_bound)? {
        return verdict(
            Effectivity::Effective,
            EffectivityWitness::RootCombination { coefficients, remainder },
        );
    }
    if degree == 0 {
        return verdict(
            Effectivity::NotEffective,
            EffectivityWitness::NoOrthogonalRootCombination { bound: cone_bound },
        );
    }
    verdict(
        Effectivity::Unknown,
        EffectivityWitness::Undecided {
            square,
            degree,
            bound: cone_bound,
        },
    )
}

/// Depth-first search for `d = Σ cⱼRⱼ + rest` with `0 <= cⱼ <= bound`, not
/// all zero, and `rest` either zero or certified by Riemann–Roch.
///
/// Roots have nonnegative degree, so the degree of `rest` only decreases
/// along a branch and the branch is cut once it turns negative.
fn root_combination(
    lattice: &GramLattice,
    h: &QuasiPolarization,
    d: &DivClass,
    roots: &RootSet,
    bound: u32,
) -> Result<Option<(Vec<u32>, DivClass)>> {
    if roots.is_empty() {
        return Ok(None);
    }
    let degrees = roots
        .roots()
        .iter()
        .map(|r| h.degree(lattice, r))
        .collect::<Result<Vec<_>>>()?;
    let mut coefficients = vec![0u32; roots.len()];
    let degree = h.degree(lattice, d)?;
    search_roots(lattice, roots.roots(), &degrees, bound, 0, d.clone(), degree, &mut coefficients)
}

#[allow(clippy::too_many_arguments)]
fn search_roots(
    lattice: &GramLattice,
    roots: &[DivClass],
    degrees: &[i64],
    bound: u32,
    index: usize,
    rest: DivClass,
    rest_degree: i64,
    coefficients: &mut Vec<u32>,
) -> Result<Option<(Vec<u32>, DivClass)>> {
    if index == roots.len() {
        if coefficients.iter().all(|&c| c == 0) {
            return Ok(None);
        }
        if rest.is_zero() || riemann_roch_certifies(lattice.square(&rest)?, rest_degree) {
            return Ok(Some((coefficients.clone(), rest)));
        }
        return Ok(None);
    }
    let mut current = rest;
    let mut current_degree = rest_degree;
    for c in 0..=bound {
        if current_degree < 0 {
            break;
        }
        coefficients[index] = c;
        if let Some(found) = search_roots(
            lattice,
            roots,
            degrees,
            bound,
            index + 1,
            current.clone(),
            current_degree,
            coefficients,
        )? {
            return Ok(Some(found));
        }
        current = &current - &roots[index];
        current_degree -= degrees[index];
    }
    coefficients[index] = 0;
    Ok(None)
}

/// A lower bound for `h⁰(D)` of an effective class.
///
/// `max(χ(D), 0)`, raised to `k + 1` when `D = kP` with `P` primitive,
/// `P² = 0` and `P·H > 0` (the `k`-th multiple of an elliptic pencil).
pub fn h0_lower_bound(lattice: &GramLattice, h: &QuasiPolarization, d: &DivClass, roots: &RootSet) -> Result<i64> {
    let verdict = effectivity_status(lattice, h, d, roots)?;
    if !verdict.is_effective() {
        return Err(Error::Precondition(format!(
            "h0 lower bound requested for {d}, which is not certified effective ({:?})",
            verdict.status
        )));
    }
    let mut bound = lattice.chi(d)?.max(0);
    if let Some((k, p)) = d.primitive_part() {
        if lattice.square(&p)? == 0 && h.degree(lattice, &p)? > 0 {
            bound = bound.max(k + 1);
        }
    }
    Ok(bound)
}

/// Result of absorbing the fixed curves `Δⱼ` into the parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedComponentReduction {
    pub parts: Vec<DivClass>,
    /// `(part index, original delta index)` in the order they were absorbed.
    pub steps: Vec<(usize, usize)>,
}

/// Turns `H = D₁ + … + Dₙ + Δ₁ + … + Δₘ` into `H = D̄₁ + … + D̄ₙ` with
/// `D̄ᵢ² >= Dᵢ²`, absorbing one `Δⱼ` at a time into a part meeting it
/// positively. Among all candidate pairs the lexicographically smallest
/// `(i, j)` is taken.
pub fn reduce_fixed_components(
    lattice: &GramLattice,
    h: &QuasiPolarization,
    parts: &[DivClass],
    delta: &[DivClass],
) -> Result<FixedComponentReduction> {
    if parts.is_empty() {
        return Err(Error::Precondition("at least one part is required".into()));
    }
    let rank = lattice.rank();
    for d in parts.iter().chain(delta) {
        lattice.check_dim(d)?;
    }
    let total = &DivClass::sum(rank, parts) + &DivClass::sum(rank, delta);
    if &total != h.class() {
        return Err(Error::Precondition(format!(
            "parts and fixed curves sum to {total}, not to H = {}",
            h.class()
        )));
    }
    let mut declared_roots = Vec::new();
    for (j, curve) in delta.iter().enumerate() {
        let square = lattice.square(curve)?;
        if square < -2 {
            return Err(Error::Precondition(format!(
                "fixed curve #{j} has square {square} < -2 and cannot be irreducible"
            )));
        }
        if square == -2 && h.degree(lattice, curve)? >= 0 {
            declared_roots.push(curve.clone());
        }
    }
    let roots = RootSet::new(lattice, h, declared_roots)?;
    for (i, part) in parts.iter().enumerate() {
        let verdict = effectivity_status(lattice, h, part, &roots)?;
        if !verdict.is_effective() {
            return Err(Error::Precondition(format!(
                "part #{i} = {part} is not certified effective ({:?})",
                verdict.status
            )));
        }
    }

    let mut current: Vec<DivClass> = parts.to_vec();
    let mut remaining: Vec<(usize, DivClass)> = delta.iter().cloned().enumerate().collect();
    let mut steps = Vec::with_capacity(delta.len());
    while !remaining.is_empty() {
        let mut chosen = None;
        'search: for (i, part) in current.iter().enumerate() {
            for (pos, (_, curve)) in remaining.iter().enumerate() {
                if lattice.intersect(part, curve)? >= 1 {
                    chosen = Some((i, pos));
                    break 'search;
                }
            }
        }
        let Some((i, pos)) = chosen else {
            return Err(Error::InconsistentGeometricData(format!(
                "no part meets any of the {} remaining fixed curves positively; H is not numerically 1-connected",
                remaining.len()
            )));
        };
        let (original, curve) = remaining.remove(pos);
        current[i] = &current[i] + &curve;
        steps.push((i, original));
    }
    Ok(FixedComponentReduction { parts: current, steps })
}

/// Outcome of the dichotomy for two classes without fixed components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum TwoDivisorCase {
    /// `M₁ = n₁E`, `M₂ = n₂E` for a common primitive isotropic class `E`.
    SameEllipticPencil { n1: i64, n2: i64, pencil: DivClass },
    /// `M₁·M₂ > 0` and `(M₁ + M₂)² >= 4`.
    SumSquareAtLeast4 { sum_square: i64 },
}

pub fn two_divisor_classification(lattice: &GramLattice, m1: &DivClass, m2: &DivClass) -> Result<TwoDivisorCase> {
    let s1 = lattice.square(m1)?;
    let s2 = lattice.square(m2)?;
    if s1 < 0 || s2 < 0 {
        return Err(Error::Precondition(format!(
            "classes without fixed components have nonnegative squares, got {s1} and {s2}"
        )));
    }
    let product = lattice.intersect(m1, m2)?;
    if product < 0 {
        return Err(Error::InconsistentGeometricData(format!(
            "M1·M2 = {product} < 0 is impossible without fixed components"
        )));
    }
    if product > 0 {
        let sum_square = lattice.square(&(m1 + m2))?;
        if sum_square < 4 {
            return Err(Error::InconsistentGeometricData(format!(
                "numeric data incompatible with the two-divisor lemma: M1·M2 = {product} > 0 but (M1 + M2)² = {sum_square} < 4"
            )));
        }
        return Ok(TwoDivisorCase::SumSquareAtLeast4 { sum_square });
    }
    if s1 != 0 || s2 != 0 {
        return Err(Error::InconsistentGeometricData(format!(
            "M1·M2 = 0 forces M1² = M2² = 0, got {s1} and {s2}"
        )));
    }
    match (m1.primitive_part(), m2.primitive_part()) {
        (Some((n1, p1)), Some((n2, p2))) if p1 == p2 => Ok(TwoDivisorCase::SameEllipticPencil { n1, n2, pencil: p1 }),
        _ => Err(Error::InconsistentGeometricData(
            "M1·M2 = 0 but M1 and M2 are not positive multiples of a common primitive isotropic class".into(),
        )),
    }
}
