//! Pseudo-bosonic operator pairs, their deformed displacement and squeezing
//! operators, and the bi-coherent and bi-squeezed states they generate, all in
//! a truncated number basis with explicit tail diagnostics.

pub mod analysis;
pub mod deformations;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod numerics;
pub mod operators;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64;
