//! Phase-space toolkit for Gaussian quantum bit commitment.
//!
//! Everything is expressed through first and second moments: a Gaussian
//! state is a mean vector plus a covariance matrix, a Gaussian unitary is a
//! symplectic matrix plus a displacement. On top of that the crate builds
//! Williamson and normal-mode decompositions, Gaussian intrinsic
//! purifications, distinguishability functionals (overlap, Bhattacharyya,
//! fidelity, trace-distance bounds), and the synthesis of Alice's Gaussian
//! cheating unitary for an ε-concealing bit-commitment protocol together
//! with a numerical certificate of the √(2ε) binding-failure bound.
//!
//! Conventions: quadratures are interleaved (x₁,p₁,…,xₙ,pₙ) and the vacuum
//! covariance is the identity, so symplectic eigenvalues satisfy ν ≥ 1.

pub mod attack;
pub mod error;
pub mod io;
pub mod metrics;
pub mod purification;
pub mod state;
pub mod symplectic;
pub mod tol;

pub use error::GqbcError;
pub use tol::Tolerances;

pub type Result<T> = std::result::Result<T, GqbcError>;
