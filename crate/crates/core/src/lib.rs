//! Exact computations around p-adic measures, stringy point counts and the
//! mass formulas for étale algebras over a p-adic field.
//!
//! Symbolic results live in [`exactq`] as expressions in the residue field
//! cardinality `q`; numeric cross-checks specialize them at `q = p`.

pub mod exactq;
pub mod massformulas;
pub mod partitions;
pub mod series;
pub mod localfields;
mod util;

pub use util::is_prime;
pub mod mckay;
pub mod stringy;
pub mod padic;
