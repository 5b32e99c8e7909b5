//! Metric target spaces.
//!
//! A target usable by the extension algorithm must be an absolute
//! 1-Lipschitz retract in the operational sense: metrically convex
//! (geodesic points exist) and with a constructive witness for the binary
//! intersection property (pairwise intersecting balls have a common point).
//! Finite metric trees and `ℓ∞^d` boxes qualify; the Euclidean plane does
//! not, and is shipped only so checkers can exercise counterexamples.

mod boxspace;
mod plane;
mod tree;

pub use boxspace::BoxTarget;
pub use plane::PlaneTarget;
pub use tree::{MetricTree, TreeEdgeId, TreePoint, TreeVertexId};

use crate::Result;

/// Feasibility threshold for ball-intersection tests: the intersection is
/// declared nonempty when the minimum of `max_i (d(x, c_i) - r_i)` does not
/// exceed this. Kept well below [`crate::GEOM_TOL`] so that returned
/// witnesses stay within `r_i + 1e-9` of every center.
pub const FEASIBILITY_TOL: f64 = 1e-10;

/// Slack added to clipping radii when extracting a witness, absorbing the
/// last-ulp disagreement between the closed-form minimum and the interval
/// arithmetic that realizes it.
pub(crate) const CLIP_SLACK: f64 = 1e-12;

/// A metric space that target values live in.
///
/// `distance` must be a metric; when `geodesic_point` is supported it must
/// satisfy `d(p, geodesic_point(p, q, λ)) = λ·d(p, q)` up to rounding.
/// Radii passed to `ball_intersection_witness` may be `f64::INFINITY`,
/// meaning the whole space.
pub trait TargetSpace {
    type Point: Clone + PartialEq + std::fmt::Debug + Send + Sync;

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> f64;

    fn geodesic_point(&self, p: &Self::Point, q: &Self::Point, lambda: f64) -> Result<Self::Point>;

    /// Returns a point in the common intersection of the given closed balls,
    /// or `None` when the intersection is empty. Errors when the space has
    /// no constructive witness.
    fn ball_intersection_witness(
        &self,
        balls: &[(Self::Point, f64)],
    ) -> Result<Option<Self::Point>>;
}

pub(crate) fn validate_radii(balls: &[(impl Sized, f64)]) -> Result<()> {
    if balls.is_empty() {
        return Err(crate::Error::input("ball list must be nonempty"));
    }
    for (_, r) in balls {
        if r.is_nan() || *r < 0.0 {
            return Err(crate::Error::input(format!("invalid ball radius {r}")));
        }
    }
    Ok(())
}
