//! Numerical models of Riemannian 3-symmetric Lie algebras.
//!
//! The crate builds semi-direct product models V x| L from a catalog of
//! admissible representations, computes their geometric invariants (torsion,
//! curvature, Ricci, intrinsic torsion, Kaehler-type conditions), verifies
//! the structural facts those models satisfy (curvature nullity equals the
//! radical, soliton metrics are exactly the almost-Kaehler ones, local
//! irreducibility), parametrizes the moduli of invariant metrics and computes
//! isometry algebras through an iterated-stabilizer filtration.
//!
//! Everything is residual-based double precision linear algebra on dense
//! tensors; all rank decisions share a single configurable threshold.

pub mod catalog;
pub mod config;
pub mod error;
pub mod geometry;
pub mod isometry;
pub mod lie;
pub mod linalg;
pub mod moduli;
pub mod rep;
pub mod report;
pub mod semidirect;
pub mod threesym;

pub use config::{Config, RankBounds, Tolerances};
pub use error::{Error, Result};
