//! Numerical toolkit for Schrödinger operators on quantum graphs whose
//! edge multiplicities are driven by a subshift of finite type.
//!
//! The model: between consecutive integers `n` and `n+1` sit `ω_n` parallel
//! unit edges, where `ω` is a bi-infinite letter sequence from a shift space
//! with forbidden adjacent pairs. The Laplacian on that metric graph with
//! Kirchhoff vertex conditions reduces to a discrete three-term recursion,
//! and everything spectral — Lyapunov exponents, Green's functions,
//! localization — is reachable through SL(2,ℝ) transfer-matrix products.
//!
//! Module map:
//!
//! - [`sft`] — shift space: alphabet, forbidden pairs, finite windows,
//!   shift map, metric, dynamical hypothesis checks.
//! - [`markov`] — stationary Markov measures compatible with the shift,
//!   exact cylinder weights, two-sided sampling.
//! - [`energy`] — consistent (E, k, 2·cos k) energy bookkeeping.
//! - [`sl2`] — 2×2 unimodular matrices and overflow-safe long products.
//! - [`cocycle`] — the transfer-matrix cocycle, solution propagation,
//!   Lyapunov estimation, holonomies, projective orbit statistics.
//! - [`jacobi`] — finite-volume tridiagonal operators: determinant
//!   recursions, Green's functions, eigensolves, vertex-condition checks.
//! - [`lab`] — seeded, reproducible experiment drivers built on the above.

pub mod cocycle;
pub mod energy;
mod error;
pub mod jacobi;
pub mod lab;
pub mod markov;
pub mod rng;
pub mod sft;
pub mod sl2;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
