//! Fourier analysis on the discrete duals of compact quantum groups.
//!
//! Elements are finitely supported families of Fourier coefficients `α ↦ f̂(α)`; the crate
//! provides the `ℓ^p` norms, pairing and convolution on such families, randomized series
//! `f_U`, exact Schur-orthogonality data, and function-side evaluation on finite groups and
//! on `SU(2)` for classical checks.

pub mod classical;
pub mod dual;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod l2_operators;
pub mod linalg;
pub mod quantum_examples;
pub mod random_series;
pub mod rng;

pub use dual::{DualDescriptor, DualFamily, IrrepData};
pub use error::{Error, Result};
pub use fourier::FourierCoeffs;
pub use linalg::CMatrix;
pub use rng::RngSeed;
