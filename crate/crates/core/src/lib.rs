//! Exact-arithmetic workbench for the birational geometry of chain curves:
//! ordered-partition combinatorics, divisor-class lattices on blow-up models,
//! toric line-bundle cohomology, exceptional-collection certificates and
//! weight-window bookkeeping on torus quotients of `(P^1)^n`.
//!
//! Everything is computed over exact integers and rationals; there is no
//! floating point anywhere in the crate.

pub mod combinat;
pub mod excoll;
pub mod gitwin;
pub mod picard;
pub mod report;
pub mod toric;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
