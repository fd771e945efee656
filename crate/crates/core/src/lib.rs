//! Nash equilibria of a two-player antagonistic quantum game whose players
//! hold real two-dimensional strategy spaces.
//!
//! The pay operator is built on the tensor product of the players' planes,
//! reduced to a classical bilinear game on the torus, and solved analytically
//! through its eigenequilibria. A brute-force grid search cross-checks every
//! analytic answer.

pub mod algebra2;
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod oracle;
pub mod quantum_model;
pub mod reduction;

pub use error::GameError;
