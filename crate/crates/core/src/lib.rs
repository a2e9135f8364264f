//! Concurrence of positive trace-preserving qubit maps.
//!
//! The concurrence `C_Φ(ρ)`, the convex roof of `2·sqrt(det Φ(π))`, is
//! computed exactly as the square root of a positive semidefinite quadratic
//! form on the Minkowski representation of `ρ`. The same machinery gives the
//! concurrence of rank-two states of `2 × n` systems and a lower bound on their
//! entanglement of formation.

pub mod bipartite;
pub mod channel;
pub mod error;
pub mod minkowski;
pub mod oracle;
pub mod roof;
pub mod sample;
pub mod simplex;
pub mod sphere;

pub use bipartite::{BipartiteState, EofBound, InducedMap};
pub use channel::{AffineMap, CanonicalParams, ChoiMatrix};
pub use error::{Error, Result};
pub use minkowski::{CausalClass, FourVector, Hermitian2, MinkowskiMetric};
pub use oracle::{OracleConfig, SufficiencyReport};
pub use roof::{Decomposition, QuadraticForm, RoofSolution, RoofSolver, Tolerances};
