//! Infinity-harmonic extension of tree-valued maps on finite graphs.
//!
//! The crate is organized around five pieces:
//!
//! * [`targets`] — metric target spaces: finite metric trees (the main
//!   target), `ℓ∞^d` boxes, and a plane backend used only by checkers.
//! * [`graph`] — finite connected graphs viewed as unit-edge simplicial
//!   complexes, together with the external-path distances used by the
//!   extension algorithm.
//! * [`harmonic`] — the infinity-harmonicity test and the constructive
//!   Lipschitz-preserving infinity-harmonic extension.
//! * [`amle`] — linear interpolation to the complex and verification of the
//!   absolutely-minimal-Lipschitz-extension property, both through the
//!   harmonicity certificate and through a brute-force open-set oracle.
//! * [`politics`] — the two-player stochastic game whose value recovers the
//!   extension, with seeded Monte-Carlo value estimation.
//! * [`discretize`] — ε-nets of a length space, the induced graphs, and
//!   convergence studies of the resulting approximate extensions.
//!
//! Randomized components all consume a caller-supplied seed and reduce in a
//! fixed order, so results are identical at any parallelism level.

pub mod amle;
pub mod discretize;
pub mod error;
pub mod graph;
pub mod harmonic;
pub mod io;
pub mod politics;
pub mod targets;
pub mod validation;

pub use error::{Error, Result};

/// Absolute tolerance for geometric equality checks.
pub const GEOM_TOL: f64 = 1e-9;

/// Offsets within this distance of an edge endpoint snap to the vertex form,
/// making point equality decidable by field comparison.
pub const SNAP_TOL: f64 = 1e-12;
