//! Time-dependent Darboux and Crum transformations of the one-dimensional
//! Schrödinger equation `i ψₜ = −ψₓₓ + U(x,t) ψ`, with numerical checks of
//! the operator identities they satisfy.

pub mod darboux;
pub mod error;
pub mod numerics;
pub mod pde;
pub mod potentials;
pub mod seeds;
pub mod specfun;
pub mod superalgebra;
pub mod verify;

pub use error::{Error, Result};
