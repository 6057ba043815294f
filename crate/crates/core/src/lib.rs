//! Numerical tensor algebra for pointwise models of Riemannian almost
//! product structures.
//!
//! A point model consists of a 2n-dimensional real vector space carrying a
//! positive-definite metric `g` and a product structure `P` with `P² = id`,
//! `g(Px,Py) = g(x,y)` and `tr P = 0`.  On top of that the crate builds the
//! curvature-like tensor machinery (ψ₁/ψ₂, π₁/π₂/π₃, Ricci-type
//! contractions), the two-parameter family of natural connections with their
//! torsion and curvature relations, the invariant tensors B, A, C, E, and a
//! seeded, reproducible verification suite that checks every identity as a
//! floating-point residual.
//!
//! Everything is pure and deterministic: random data comes from named
//! ChaCha8 streams derived from a master seed, so reports are reproducible
//! byte for byte.

pub mod classify;
pub mod connection;
pub mod curvature;
mod error;
pub mod invariants;
pub mod io;
pub mod rng;
pub mod structure;
pub mod suite;
pub mod tensor;

pub use error::Error;
pub use tensor::{residual, ResidualReport, Tensor};

/// Default relative tolerance for identity checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Tolerance for construction-exact structural invariants.
pub const STRUCT_TOL: f64 = 1e-12;

/// Tolerance at which generated curvature tensors must pass their predicates.
pub const PREDICATE_TOL: f64 = 1e-10;
