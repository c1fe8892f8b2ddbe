//! Matching a decomposition profile against the square patterns that force
//! a violation, and producing the grouping certificate.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::profile::{
    n4_low_intersections, no_negative_intersections, no_negative_intersections_any_order, partition_certificate,
    sort_by_products, CertificateSketch, DecompositionProfile, SketchRule,
};
use crate::error::{Error, Result};

/// The square patterns under which a decomposition into parts with
/// `h⁰ >= 2` forces `h⁰(L)h⁰(R) > g` for some grouping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseId {
    /// At least five parts.
    FiveOrMoreParts,
    /// Four parts, one of square at least 2.
    FourPartsOneBig,
    /// Three parts, all squares at least 2.
    ThreePartsAllBig,
    /// Three parts with squares `(>= 8, 2, 0)`.
    ThreePartsEightTwoZero,
    /// Three parts with squares `(>= a, a >= 4, 0)`.
    ThreePartsTwoBigOneIsotropic,
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseId::FiveOrMoreParts => "n>=5",
            CaseId::FourPartsOneBig => "n=4: D1² >= 2",
            CaseId::ThreePartsAllBig => "n=3: D1² >= D2² >= D3² >= 2",
            CaseId::ThreePartsEightTwoZero => "n=3: D1² >= 8, D2² = 2, D3² = 0",
            CaseId::ThreePartsTwoBigOneIsotropic => "n=3: D1² >= D2² >= 4, D3² = 0",
        })
    }
}

/// Square patterns not covered by any forcing case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExceptionalLabel {
    /// Three parts with squares `(2|4|6, 2, 0)`.
    ThreePartsSmallSquares,
    /// Three parts, at least two of them isotropic.
    ThreePartsTwoIsotropic,
    /// Four isotropic parts.
    FourPartsAllIsotropic,
}

impl fmt::Display for ExceptionalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExceptionalLabel::ThreePartsSmallSquares => "n=3: D1² ∈ {2,4,6}, D2² = 2, D3² = 0",
            ExceptionalLabel::ThreePartsTwoIsotropic => "n=3: D2² = 0, D3² = 0",
            ExceptionalLabel::FourPartsAllIsotropic => "n=4 all isotropic",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseMatch {
    Case(CaseId),
    Exceptional(ExceptionalLabel),
}

/// Classifies a list of squares (any order). Total on `n >= 3` lists of
/// nonnegative even squares.
pub fn match_case(squares: &[i64]) -> Result<CaseMatch> {
    let n = squares.len();
    if n < 3 {
        return Err(Error::InvalidProfile(format!("case matching needs at least three parts, got {n}")));
    }
    if n >= 5 {
        return Ok(CaseMatch::Case(CaseId::FiveOrMoreParts));
    }
    if let Some(&s) = squares.iter().find(|&&s| s < 0 || s % 2 != 0) {
        return Err(Error::InvalidProfile(format!("square {s} is negative or odd")));
    }
    if n == 4 {
        return Ok(if squares.iter().any(|&s| s >= 2) {
            CaseMatch::Case(CaseId::FourPartsOneBig)
        } else {
            CaseMatch::Exceptional(ExceptionalLabel::FourPartsAllIsotropic)
        });
    }
    let mut d = squares.to_vec();
    d.sort_unstable_by(|a, b| b.cmp(a));
    Ok(match (d[0], d[1], d[2]) {
        (_, _, c) if c >= 2 => CaseMatch::Case(CaseId::ThreePartsAllBig),
        (_, 0, _) => CaseMatch::Exceptional(ExceptionalLabel::ThreePartsTwoIsotropic),
        (a, 2, _) if a >= 8 => CaseMatch::Case(CaseId::ThreePartsEightTwoZero),
        (_, 2, _) => CaseMatch::Exceptional(ExceptionalLabel::ThreePartsSmallSquares),
        _ => CaseMatch::Case(CaseId::ThreePartsTwoBigOneIsotropic),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CaseReport {
    NotBnGeneral { case: CaseId, certificate: CertificateSketch },
    ExceptionalProfile { label: ExceptionalLabel },
    /// The numeric grouping argument did not close; the geometric
    /// dichotomy for parts without fixed components is needed.
    RequiresGeometricInput { case: CaseId, reason: String },
}

/// Applies the forcing cases to a profile whose parts all satisfy
/// `h⁰(Dᵢ) >= 2` (asserted through `h0_at_least_2`).
pub fn classify_multi_decomposition(profile: &DecompositionProfile, h0_at_least_2: &[bool]) -> Result<CaseReport> {
    if h0_at_least_2.len() != profile.n() {
        return Err(Error::DimensionMismatch { expected: profile.n(), found: h0_at_least_2.len() });
    }
    if let Some(i) = h0_at_least_2.iter().position(|&f| !f) {
        return Err(Error::Precondition(format!("part {} is not flagged with h0 >= 2", i + 1)));
    }
    let case = match match_case(profile.squares())? {
        CaseMatch::Exceptional(label) => return Ok(CaseReport::ExceptionalProfile { label }),
        CaseMatch::Case(case) => case,
    };
    let found = match profile.n() {
        3 => certify_three(profile)?,
        4 => certify_four(profile)?,
        _ => certify_many(profile)?,
    };
    let report = match found.or_else(|| partition_certificate(profile)) {
        Some(certificate) => {
            certificate.verify_against(profile)?;
            CaseReport::NotBnGeneral { case, certificate }
        }
        None => CaseReport::RequiresGeometricInput {
            case,
            reason: match profile.two_connectedness_violation() {
                Some(cut) => format!(
                    "no grouping certificate; the profile is not numerically 2-connected (cut at parts {:?})",
                    cut.iter().map(|i| i + 1).collect::<Vec<_>>()
                ),
                None => "no grouping certificate from the numeric data alone".into(),
            },
        },
    };
    Ok(report)
}

/// Three-part route: the small-product lemma under every numbering, then
/// the single-part splits.
fn certify_three(profile: &DecompositionProfile) -> Result<Option<CertificateSketch>> {
    if let Some(s) = no_negative_intersections_any_order(profile)? {
        return Ok(Some(s));
    }
    Ok((0..3).find_map(|i| {
        let s = CertificateSketch::from_split(profile, &[i], SketchRule::SinglePartVersusRest);
        s.verify().is_ok().then_some(s)
    }))
}

fn certify_four(profile: &DecompositionProfile) -> Result<Option<CertificateSketch>> {
    for big in (0..4).filter(|&i| profile.square(i) >= 2) {
        let rest: Vec<usize> = (0..4).filter(|&i| i != big).collect();
        let Some([a, b, c]) = sort_by_products(profile, [rest[0], rest[1], rest[2]]) else {
            continue;
        };
        let top = profile.product(b, c);
        let attempt = if top <= 1 {
            let order = [big, a, b, c];
            let groups: Vec<Vec<usize>> = order.iter().map(|&i| vec![i]).collect();
            match n4_low_intersections(&profile.grouped(&groups)?) {
                Ok(s) => s.map(|s| s.ungroup(&groups)),
                Err(Error::InconsistentGeometricData(_)) => None,
                Err(e) => return Err(e),
            }
        } else {
            // Merge the pair meeting the most; for a product of at most 3
            // the three parts satisfy the small-product condition as
            // numbered, otherwise fall back to the three-part route.
            let groups = if top <= 3 {
                vec![vec![big], vec![a], vec![b, c]]
            } else {
                vec![vec![b, c], vec![big], vec![a]]
            };
            let grouped = profile.grouped(&groups)?;
            let sketch = if top <= 3 {
                match no_negative_intersections(&grouped) {
                    Ok(s) => s,
                    Err(Error::InconsistentGeometricData(_)) => None,
                    Err(e) => return Err(e),
                }
            } else {
                certify_three(&grouped)?
            };
            sketch.map(|s| s.ungroup(&groups))
        };
        if let Some(s) = attempt.filter(|s| s.verify_against(profile).is_ok()) {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// Five or more parts: merge two disjoint pairs that meet positively with
/// group squares at least 4, put everything else into a third part, and
/// run the three-part route.
fn certify_many(profile: &DecompositionProfile) -> Result<Option<CertificateSketch>> {
    let n = profile.n();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| profile.product(i, j) > 0 && profile.group_square(&[i, j]) >= 4)
        .collect();
    for (k, &(i, j)) in pairs.iter().enumerate() {
        for &(p, q) in &pairs[k + 1..] {
            if [p, q].iter().any(|v| *v == i || *v == j) {
                continue;
            }
            let rest: Vec<usize> = (0..n).filter(|v| ![i, j, p, q].contains(v)).collect();
            let groups = vec![vec![i, j], vec![p, q], rest];
            let grouped = profile.grouped(&groups)?;
            if grouped.squares().iter().any(|&s| s < 0) {
                continue;
            }
            if let Some(s) = certify_three(&grouped)? {
                let s = s.ungroup(&groups);
                if s.verify_against(profile).is_ok() {
                    return Ok(Some(s));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_table() {
        assert_eq!(match_case(&[8, 2, 0]).unwrap(), CaseMatch::Case(CaseId::ThreePartsEightTwoZero));
        assert_eq!(match_case(&[0, 2, 6]).unwrap(), CaseMatch::Exceptional(ExceptionalLabel::ThreePartsSmallSquares));
        assert_eq!(match_case(&[0; 4]).unwrap(), CaseMatch::Exceptional(ExceptionalLabel::FourPartsAllIsotropic));
        assert_eq!(match_case(&[4, 4, 0]).unwrap(), CaseMatch::Case(CaseId::ThreePartsTwoBigOneIsotropic));
        assert_eq!(match_case(&[2, 2, 2]).unwrap(), CaseMatch::Case(CaseId::ThreePartsAllBig));
        assert_eq!(match_case(&[10, 0, 0]).unwrap(), CaseMatch::Exceptional(ExceptionalLabel::ThreePartsTwoIsotropic));
        assert_eq!(match_case(&[0; 5]).unwrap(), CaseMatch::Case(CaseId::FiveOrMoreParts));
        assert!(match_case(&[2, 2]).is_err());
        assert!(match_case(&[-2, 2, 2]).is_err());
    }

    #[test]
    fn classify_examples() {
        let p = DecompositionProfile::from_upper(vec![8, 2, 0], &[3, 2, 2]).unwrap();
        match classify_multi_decomposition(&p, &[true; 3]).unwrap() {
            CaseReport::NotBnGeneral { case, certificate } => {
                assert_eq!(case, CaseId::ThreePartsEightTwoZero);
                certificate.verify_against(&p).unwrap();
            }
            other => panic!("unexpected {other:?}"),
        }
        let p = DecompositionProfile::from_upper(vec![6, 2, 0], &[3, 2, 2]).unwrap();
        assert_eq!(
            classify_multi_decomposition(&p, &[true; 3]).unwrap(),
            CaseReport::ExceptionalProfile { label: ExceptionalLabel::ThreePartsSmallSquares }
        );
        let p = DecompositionProfile::from_upper(vec![0; 4], &[1; 6]).unwrap();
        assert_eq!(
            classify_multi_decomposition(&p, &[true; 4]).unwrap(),
            CaseReport::ExceptionalProfile { label: ExceptionalLabel::FourPartsAllIsotropic }
        );
    }

    #[test]
    fn flags_are_checked() {
        let p = DecompositionProfile::from_upper(vec![8, 2, 0], &[3, 2, 2]).unwrap();
        assert!(matches!(classify_multi_decomposition(&p, &[true, false, true]), Err(Error::Precondition(_))));
        assert!(classify_multi_decomposition(&p, &[true; 2]).is_err());
    }

    #[test]
    fn four_parts_with_large_products() {
        let p = DecompositionProfile::from_upper(vec![2, 0, 0, 0], &[1, 1, 1, 2, 3, 6]).unwrap();
        let CaseReport::NotBnGeneral { case, certificate } = classify_multi_decomposition(&p, &[true; 4]).unwrap() else {
            panic!("expected a certificate");
        };
        assert_eq!(case, CaseId::FourPartsOneBig);
        certificate.verify_against(&p).unwrap();
    }

    #[test]
    fn five_parts() {
        let p = DecompositionProfile::from_upper(vec![0; 5], &[1, 1, 1, 1, 1, 1, 1, 1, 1, 1]).unwrap();
        let CaseReport::NotBnGeneral { certificate, .. } = classify_multi_decomposition(&p, &[true; 5]).unwrap() else {
            panic!("expected a certificate");
        };
        certificate.verify_against(&p).unwrap();
    }
}
