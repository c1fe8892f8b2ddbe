//! The determinant condition on `aᵢ = Dᵢ²/2 + 1` with its Dynkin labels,
//! plus the integer inequalities used along the three-part chain.

use serde::Serialize;

use crate::error::{Error, Result};

/// `a₁a₂a₃ - a₁ - a₂ - a₃ - 2 < 0`.
pub fn is_exceptional(a1: i64, a2: i64, a3: i64) -> bool {
    a1 * a2 * a3 - a1 - a2 - a3 - 2 < 0
}

/// All `a₁ >= a₂ >= a₃ >= 1` with `a₁ <= a_max` failing the determinant
/// condition, in lexicographic order.
pub fn enumerate_exceptional_triples(a_max: i64) -> Result<Vec<(i64, i64, i64)>> {
    if a_max < 1 {
        return Err(Error::InvalidArgument(format!("a_max = {a_max} must be at least 1")));
    }
    let mut out = Vec::new();
    for a1 in 1..=a_max {
        for a2 in 1..=a1 {
            // the left side is nondecreasing in a₃
            for a3 in 1..=a2 {
                if is_exceptional(a1, a2, a3) {
                    out.push((a1, a2, a3));
                } else {
                    break;
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// The Dynkin type whose legs have lengths `a₁, a₂, a₃`: the diagram has
/// `a₁ + a₂ + a₃ + 1` nodes, giving `D` for `(a, 1, 1)` and `E` for
/// `(a, 2, 1)`.
pub fn dynkin_label(a1: i64, a2: i64, a3: i64) -> Result<String> {
    if !(a1 >= a2 && a2 >= a3 && a3 >= 1) || !is_exceptional(a1, a2, a3) {
        return Err(Error::InvalidArgument(format!("({a1}, {a2}, {a3}) is not an exceptional triple")));
    }
    let nodes = a1 + a2 + a3 + 1;
    Ok(match (a2, a3) {
        (1, 1) => format!("D{nodes}"),
        _ => format!("E{nodes}"),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AmGm {
    /// `u + v <= 2c ⇒ uv <= c²`.
    pub basic: bool,
    /// `u + v <= 2c ∧ 0 <= v < c ⇒ uv <= c² - 1`.
    pub strict: bool,
}

/// Evaluates both implications on the given integers.
///
/// The first implication needs `u + v >= 0` as well; for example
/// `u = v = -20`, `c = -5` makes it false. [`am_gm_nonnegative_sum`]
/// evaluates the repaired form.
#[allow(clippy::int_plus_one)]
pub fn am_gm(u: i64, v: i64, c: i64) -> AmGm {
    let (u, v, c) = (i128::from(u), i128::from(v), i128::from(c));
    let hyp = u + v <= 2 * c;
    AmGm {
        basic: !hyp || u * v <= c * c,
        strict: !(hyp && 0 <= v && v < c) || u * v <= c * c - 1,
    }
}

/// `0 <= u + v <= 2c ⇒ uv <= c²`.
pub fn am_gm_nonnegative_sum(u: i64, v: i64, c: i64) -> bool {
    let (u, v, c) = (i128::from(u), i128::from(v), i128::from(c));
    !(0 <= u + v && u + v <= 2 * c) || u * v <= c * c
}

/// Lower bound `(ε₁ + 2)(ε₁ + 2ε₂ + 5)` for `χ(D̄ᵢ₁)χ(D̄ᵢ₂ + D̄ᵢ₃)` when both
/// grouping conditions fail for three parts.
pub fn c1(e1: i64, e2: i64) -> i64 {
    (e1 + 2) * (e1 + 2 * e2 + 5)
}

/// Upper bounds for `h⁰(A)h¹(A)` by the sign pattern of the `sᵢ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPattern {
    AllPositive,
    OneNonPositive,
    TwoNonPositive,
}

/// `4·c₂(ε₁, ε₂)`, scaled so the all-positive bound `((ε₁ + ε₂ + 6)/2)²`
/// stays integral.
pub fn c2_times_four(pattern: SignPattern, e1: i64, e2: i64) -> i64 {
    match pattern {
        SignPattern::AllPositive => (e1 + e2 + 6) * (e1 + e2 + 6),
        SignPattern::OneNonPositive => 4 * (e1 + e2 + 2) * (e1 + e2 + 4),
        SignPattern::TwoNonPositive => 16 * (e1 + 1),
    }
}

/// `c₁ >= c₂` for `ε₁ >= ε₂`, `ε₂ ∈ {0, 1}`.
pub fn c1_dominates_c2(pattern: SignPattern, e1: i64, e2: i64) -> Result<bool> {
    if !(0..=1).contains(&e2) || e1 < e2 {
        return Err(Error::InvalidArgument(format!("need ε₁ >= ε₂ and ε₂ ∈ {{0, 1}}, got ({e1}, {e2})")));
    }
    Ok(4 * c1(e1, e2) >= c2_times_four(pattern, e1, e2))
}
