//! Spectral-curve toolkit for equivariant constrained Willmore tori in S³.
//!
//! The pipeline runs from a conformal Hopf differential `q(y)` to its
//! Euler–Lagrange flow, polynomial Killing fields, the spectral curve seen
//! from both the Killing-field and the monodromy side, and finally the
//! reconstructed torus with its Willmore energy.

pub mod algebra;
pub mod cli;
pub mod dirac;
pub mod elflow;
pub mod error;
pub mod fd;
pub mod killing;
pub mod ode;
pub mod reconstruct;
pub mod seifert;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
