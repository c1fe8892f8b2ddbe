//! Exact divisor arithmetic on even lattices modelling K3 Picard lattices,
//! Brill–Noether violation certificates, and bounded exhaustive checks of
//! the integer case analysis behind them.
//!
//! ```
//! use k3bn::{DivClass, GramLattice};
//!
//! let u = GramLattice::hyperbolic_plane();
//! let h = DivClass::new(vec![1, 3]);
//! assert_eq!(u.square(&h).unwrap(), 6);
//! assert_eq!(u.genus(&h).unwrap(), 4);
//! ```

#![allow(clippy::needless_range_loop)]

pub mod bn;
pub mod cases;
pub mod cli;
pub mod error;
pub mod lattice;
pub mod mukai;
pub mod divisor;

pub use error::{Error, Result};
pub use lattice::{DivClass, GramLattice, QuasiPolarization};
pub use mukai::MukaiVector;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lattices.md")]
    mod lattices {}
    #[doc = include_str!("../../../book/src/effectivity.md")]
    mod effectivity {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/case_analysis.md")]
    mod case_analysis {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
