//! Numerical tools for non-self-adjoint Jacobi matrices with complex
//! coefficients: transfer matrices, the Λ set of limit transfer matrices,
//! generalised eigenvectors, Turán determinants and finite-section spectra.

pub mod cli;
pub mod eigen;
pub mod error;
pub mod fit;
pub mod io;
pub mod sequences;
pub mod spectrum;
pub mod transfer;
pub mod turan;

pub use error::{Error, Result};
