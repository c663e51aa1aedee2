//! Numerics for binary linear codes under erasure and bit-flip noise:
//! GF(2) code machinery, Walsh–Hadamard analysis on the Boolean cube, the
//! erasure functional m(λ), Rényi-entropy and norm bounds for the BSC,
//! exact Krawtchouk tables with the ψ(q,γ) exponent, and censuses of
//! sum-zero 4-tuples in weight level sets.
//!
//! Everything is deterministic: random objects are ChaCha-seeded and all
//! estimators record their seeds.

pub mod census;
pub mod cube;
pub mod erasure;
pub mod error;
pub mod gf2;
pub mod psi;
pub mod renyi;

pub use error::{Error, Result};
