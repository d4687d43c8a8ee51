//! Finite-dimensional statistical mixtures of quantum states.
//!
//! Ensembles `{|φᵢ⟩, pᵢ}` are kept as member lists rather than collapsed to
//! their density operator, so two ensembles sharing the same ρ can still be
//! told apart through the higher-order moments of the expectation-value
//! random variable `X = ⟨φ|O|φ⟩`. The crate also covers von Neumann
//! entropy, closed-system evolution, partial traces of bipartite pure states
//! and a seeded Monte-Carlo sampler that reproduces the exact moments.

// Negated float comparisons below also reject NaN inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bipartite;
pub mod dynamics;
pub mod error;
pub mod mixtures;
pub mod moments;
pub mod qalgebra;
pub mod sampling;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Tolerance on ket normalization and unit directions.
pub const EPS_NORM: f64 = 1e-12;
/// Tolerance on Hermiticity residues.
pub const EPS_HERM: f64 = 1e-10;
/// Tolerance on eigendecomposition reconstruction and derived quantities.
pub const EPS_EIG: f64 = 1e-9;
/// Tolerance on probability sums and traces.
pub const EPS_PROB: f64 = 1e-9;
/// Tolerance for the piecewise scenario checks (two spectral decompositions compose).
pub const EPS_SCENARIO: f64 = 1e-8;
