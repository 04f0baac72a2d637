//! Numerical laboratory for one-dimensional random Schrödinger operators
//! `H = -Δ + kV` on `[0, L]` with Dirichlet boundary conditions.
//!
//! The crate computes low-lying eigenvalues of a finite-difference
//! discretization, the landscape function `u` solving `Hu = 1`, the effective
//! potential `W = 1/u` and its ordered local minima, and compares the ratio
//! `λ_n / W_n` against `π²/8`. Exact continuum solvers for piecewise-constant
//! potentials serve as independent oracles for the discrete pipeline.

pub mod cli;
pub mod continuum;
pub mod discretize;
mod error;
pub mod experiments;
pub mod landscape;
pub mod linalg;
pub mod potential;
pub mod rng;

pub use error::{Error, Result};

/// `π²/8`, the ground-state ratio of the free Dirichlet Laplacian.
pub const PI2_OVER_8: f64 = std::f64::consts::PI * std::f64::consts::PI / 8.0;

/// Upper end of the universal two-sided bound `1 ≤ λ₁ max u ≤ 1 + 1/8 + c`
/// in one dimension, with `c ≈ 0.6055`.
pub const VOGT_UPPER: f64 = 1.0 + 0.125 + 0.6055;
