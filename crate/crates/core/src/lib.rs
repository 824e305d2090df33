//! Finite truncations of the elliptic Ruijsenaars difference operators.
//!
//! With the real period locked to the coupling, `alpha = 2π/((n+1)g + m)`, the
//! elliptic Ruijsenaars operators `D_1, …, D_n` leave the space of functions on
//! bounded partitions `Λ^{(n,m)}` invariant. This crate assembles those
//! operators as dense matrices, checks their algebraic structure
//! (commutativity, truncation, adjointness, weight recurrence), computes the
//! joint spectrum and the eigenpolynomials `P_μ(e)`, and compares the
//! trigonometric point `p = 0` against an independent Macdonald polynomial
//! oracle.
//!
//! Module map:
//!
//! * [`partitions`]: bounded partitions, vertical strips, dominance order.
//! * [`elliptic`]: the rescaled theta bracket `[z; p]`.
//! * [`coeffs`]: model parameters and the scalar coefficients `B`, `ψ′`, `Δ`, `c`.
//! * [`operators`]: dense `D_r`, `C_r`, `S_r` and their symmetrized forms.
//! * [`spectral`]: joint diagonalization and labeling of the spectrum.
//! * [`eigenpoly`]: the polynomials `P_μ(e)` and their identities on the spectrum.
//! * [`macdonald`]: the `p = 0` oracle built from symmetric polynomials.
//! * [`weightlattice`]: the dominant-weight form of the hopping coefficients.
//! * [`config`], [`schema`], [`report`]: run configuration, file formats and verification.

// negated comparisons make NaN fail the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coeffs;
pub mod config;
pub mod eigenpoly;
pub mod elliptic;
mod error;
pub mod macdonald;
pub mod operators;
pub mod partitions;
pub mod report;
pub mod schema;
pub mod spectral;
pub mod weightlattice;

pub use coeffs::ModelParams;
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use partitions::{LatticeBasis, Partition, StripMask};
