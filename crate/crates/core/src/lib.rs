//! Reduction workbench for consensus halving.
//!
//! The crate implements the chain 2D-Tucker → ND-StrongTucker (snake
//! embedding down to width 8) → ε-Consensus-Halving, together with exact
//! verifiers, a solution synthesizer, a decoder that maps consensus-halving
//! solutions back to StrongTucker solutions, and brute-force oracles.
//!
//! All arithmetic on positions, heights and discrepancies is exact
//! ([`numeric::Rational`]); nothing in the core touches floating point.

pub mod chbuild;
pub mod chsolve;
pub mod circuit;
pub mod error;
pub mod numeric;
pub mod snake;
pub mod tucker;

pub use error::{Error, Result};
