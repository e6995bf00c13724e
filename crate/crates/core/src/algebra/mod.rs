//! Exact coefficient arithmetic.

pub mod motive;
pub mod poly;
pub mod ratfunc;
pub mod ratv;

pub use motive::{adams_psi, evaluate_at_prime, HalfLefschetz, MotiveRat};
pub use poly::Poly;
pub use ratfunc::{RatFunc, Variable};
pub use ratv::{QuantumV, RatV};
