//! Exact computations with the Lie tori of type BC_r built from quadratic
//! forms over Z₂ and their extended affine Lie algebras.

pub mod bitquad;
pub mod eala;
pub mod error;
pub mod hermitian;
pub mod identities;
pub mod io;
pub mod lietorus;
pub mod linalg;
pub mod rational;
pub mod roots;
pub mod torus;
pub mod unitary;

pub use error::{Error, Result};
