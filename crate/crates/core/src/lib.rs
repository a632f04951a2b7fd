//! Exact walk-matrix certification of graphs that are determined by their
//! generalized spectrum (adjacency spectrum together with the spectrum of
//! the complement).
//!
//! The pipeline is:
//!
//! 1. build the walk matrix `W = [e, Ae, ..., A^{n-1}e]` and its arithmetic
//!    profile ([`walk::profile`]): determinant, Smith normal form, and
//!    factorizations of `det W` and of the last invariant factor `d_n`;
//! 2. exclude every odd prime of `d_n` as a possible divisor of the level of
//!    a rational orthogonal conjugator, either because it divides `det W`
//!    exactly once or because the mod-`p` kernel of `W^T` has no isotropic
//!    vector ([`exclusion`]);
//! 3. when `d_n` is exactly divisible by 2, rule out level 2 with the
//!    weight-four candidate test;
//! 4. assemble a [`exclusion::CertificationReport`].
//!
//! The [`oracle`] module is an independent brute-force check that enumerates
//! every graph on up to seven vertices and finds generalized-cospectral mates
//! directly.
//!
//! All certification arithmetic is exact; no verdict depends on floating point.

pub mod density;
pub mod error;
pub mod exclusion;
pub mod graph;
pub mod linalg;
pub mod number_theory;
pub mod oracle;
pub mod poly;
pub mod qmatrix;
pub mod walk;

pub use error::{Error, Result};
pub use exclusion::{certify, CertificationReport, PrimeStatus, Rule, Status, Verdict};
pub use graph::Graph;
pub use linalg::{IntMatrix, RatMatrix, SnfResult};
pub use number_theory::Factorization;
pub use poly::IntPolynomial;
pub use qmatrix::RationalOrthogonal;
pub use walk::WalkProfile;

/// Default Pollard-rho iteration budget per composite cofactor.
pub const DEFAULT_EFFORT: u64 = 100_000;
