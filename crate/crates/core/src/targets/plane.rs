//! The Euclidean plane, shipped as a checker-only target.
//!
//! The plane is geodesic (straight segments) but lacks the binary
//! intersection property — three pairwise intersecting disks can have empty
//! common intersection — so it cannot back the extension algorithm. It
//! exists so harmonicity and Lipschitz checkers can run on counterexample
//! embeddings.

use super::TargetSpace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct PlaneTarget;

impl PlaneTarget {
    pub fn new() -> Self {
        PlaneTarget
    }
}

impl TargetSpace for PlaneTarget {
    type Point = [f64; 2];

    fn distance(&self, p: &[f64; 2], q: &[f64; 2]) -> f64 {
        ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
    }

    fn geodesic_point(&self, p: &[f64; 2], q: &[f64; 2], lambda: f64) -> Result<[f64; 2]> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::input(format!("lambda {lambda} outside [0, 1]")));
        }
        Ok([p[0] + lambda * (q[0] - p[0]), p[1] + lambda * (q[1] - p[1])])
    }

    fn ball_intersection_witness(&self, _balls: &[([f64; 2], f64)]) -> Result<Option<[f64; 2]>> {
        Err(Error::Unsupported(
            "the Euclidean plane has no ball-intersection witness; it is a checker-only target"
                .to_owned(),
        ))
    }
}
