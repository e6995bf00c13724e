//! Exact computations around preprojective algebras of quivers.
//!
//! The crate computes Kac polynomials (Hua's formula and brute-force
//! finite-field oracles), point counts of moment-map fibers and their
//! seminilpotent loci, motivic DT-series over the commutative quantum torus
//! with ray factorization and DT-invariant extraction, and Gram-rank
//! dimensions of Bozec's generalized quantum group.

pub mod algebra;
pub mod dt;
pub mod error;
pub mod ff;
pub mod fq;
pub mod gqg;
pub mod kac;
pub mod quiver;
pub mod series;

pub use error::{Error, Result};
