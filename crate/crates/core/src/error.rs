use thiserror::Error;

/// Errors raised by the lattice, certificate and verification layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected a vector of length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("H is not a quasi-polarization: H^2 = {square} is not positive")]
    NotBig { square: i64 },

    #[error("invalid root #{index}: {reason}")]
    InvalidRoot { index: usize, reason: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The numeric data cannot come from an actual K3 surface: one of the
    /// geometric hypotheses (nefness, 2-connectedness of |H|, …) fails.
    #[error("inconsistent geometric data: {0}")]
    InconsistentGeometricData(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid enumeration box: {0}")]
    InvalidBox(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
