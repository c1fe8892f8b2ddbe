//! Brill–Noether violation certificates, at lattice level and at the level
//! of numeric decomposition profiles.

mod classify;
mod profile;
mod search;

pub use classify::{classify_multi_decomposition, match_case, CaseId, CaseMatch, CaseReport, ExceptionalLabel};
pub use profile::{
    elliptic_multiple, n4_low_intersections, no_negative_intersections, no_negative_intersections_any_order,
    partition_certificate, proper_splits, CertificateSketch, DecompositionProfile, SketchPart, SketchRule,
    PROFILE_ENTRY_LIMIT,
};
pub use search::{check_pair, enumerate_decompositions, find_violation, Decomposition, PairVerdict, ViolationCertificate};
