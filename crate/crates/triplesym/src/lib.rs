//! Numerical toolkit for third-order hyperbolic symbols `τ³ − a·τ − b` with
//! triple characteristics.
//!
//! The crate constructs the diagonal symmetrizer obtained by diagonalizing the
//! Bezout matrix of the symbol and its τ-derivative, certifies the eigenvalue
//! and derivative bounds that make the symmetrizer usable, builds the
//! discriminant-driven weight partitions, and demonstrates the resulting
//! weighted-energy machinery on reduced first-order systems at desk scale.
//!
//! Module map:
//! - [`symbols`]: coefficient fields `a(t,y)`, `b(t,y)`, the discriminant
//!   `Δ = 4a³ − 27b²`, hyperbolicity and effective-hyperbolicity checks, and
//!   the built-in operator families.
//! - [`bezoutian`]: the 3×3 Bezout matrix `S`, the companion matrix `A`, the
//!   spectral frame `(λ, T, Λ, Aᵀ)`, and certification of the eigenvalue /
//!   matrix-entry bounds.
//! - [`calculus`]: finite-difference certification of the first-derivative
//!   estimates for `a`, `b` and the eigenvalues.
//! - [`weights`]: discriminant root profiles, weight partitions (interval and
//!   cone geometry), and certification of the scalar-weight conditions.
//! - [`frequency`]: the per-frequency 3×3 ODE system, weighted-energy
//!   monitoring, and the empirical loss-of-derivatives sweep.
//! - [`cone`]: 1+1-D method-of-lines solver on space-like cones, the Stokes
//!   energy identity, and the factorized double-root energies.
//! - [`cli`]: configuration, report emission, and the command entry points
//!   used by the `triplesym` binary.

pub mod bezoutian;
pub mod calculus;
pub mod cli;
pub mod cone;
pub mod error;
pub mod expr;
pub mod frequency;
pub mod grid;
pub mod poly;
pub mod report;
pub mod symbols;
pub mod weights;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
