//! `ℓ∞^d`: d-vectors under the max-coordinate metric.

use super::{validate_radii, TargetSpace, FEASIBILITY_TOL};
use crate::error::{Error, Result};

/// The absolute 1-Lipschitz retract `(ℝ^d, ℓ∞)`. Balls are axis-aligned
/// cubes, so the binary intersection property reduces to coordinate-wise
/// interval intersection.
#[derive(Debug, Clone)]
pub struct BoxTarget {
    dimension: usize,
}

impl BoxTarget {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::input("box dimension must be positive"));
        }
        Ok(BoxTarget { dimension })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn validate_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dimension {
            return Err(Error::input(format!(
                "point has dimension {}, target has dimension {}",
                p.len(),
                self.dimension
            )));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::input("point coordinates must be finite"));
        }
        Ok(())
    }
}

impl TargetSpace for BoxTarget {
    type Point = Vec<f64>;

    fn distance(&self, p: &Vec<f64>, q: &Vec<f64>) -> f64 {
        debug_assert_eq!(p.len(), self.dimension);
        debug_assert_eq!(q.len(), self.dimension);
        p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    fn geodesic_point(&self, p: &Vec<f64>, q: &Vec<f64>, lambda: f64) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::input(format!("lambda {lambda} outside [0, 1]")));
        }
        self.validate_point(p)?;
        self.validate_point(q)?;
        Ok(p.iter().zip(q).map(|(a, b)| a + lambda * (b - a)).collect())
    }

    /// Coordinate-wise interval intersection; the witness is the midpoint of
    /// each coordinate interval. Infinite radii are skipped; if every radius
    /// is infinite the first center is returned.
    fn ball_intersection_witness(&self, balls: &[(Vec<f64>, f64)]) -> Result<Option<Vec<f64>>> {
        validate_radii(balls)?;
        for (c, _) in balls {
            self.validate_point(c)?;
        }
        let mut lo = vec![f64::NEG_INFINITY; self.dimension];
        let mut hi = vec![f64::INFINITY; self.dimension];
        let mut any_finite = false;
        for (c, r) in balls {
            if !r.is_finite() {
                continue;
            }
            any_finite = true;
            for k in 0..self.dimension {
                lo[k] = lo[k].max(c[k] - r);
                hi[k] = hi[k].min(c[k] + r);
            }
        }
        if !any_finite {
            return Ok(Some(balls[0].0.clone()));
        }
        for k in 0..self.dimension {
            if lo[k] > hi[k] + 2.0 * FEASIBILITY_TOL {
                return Ok(None);
            }
        }
        Ok(Some(lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_ball_returns_center() {
        let t = BoxTarget::new(2).unwrap();
        let w = t
            .ball_intersection_witness(&[(vec![0.5, -1.0], 3.0)])
            .unwrap()
            .unwrap();
        assert_eq!(w, vec![0.5, -1.0]);
    }

    #[test]
    fn tangency_in_one_dimension() {
        let t = BoxTarget::new(1).unwrap();
        let w = t
            .ball_intersection_witness(&[(vec![0.0], 1.0), (vec![4.0], 3.0)])
            .unwrap()
            .unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_dimensional_witness_matches_grid_oracle() {
        let t = BoxTarget::new(2).unwrap();
        let balls = vec![(vec![0.0, 0.0], 1.0), (vec![2.0, 2.0], 1.0)];
        let w = t.ball_intersection_witness(&balls).unwrap().unwrap();
        assert_eq!(w, vec![1.0, 1.0]);
        // grid check of the max-norm constraints
        let mut found = false;
        for i in 0..=40 {
            for j in 0..=40 {
                let p = vec![-1.0 + i as f64 * 0.1, -1.0 + j as f64 * 0.1];
                if balls.iter().all(|(c, r)| t.distance(&p, c) <= *r + 1e-12) {
                    found = true;
                    assert!((t.distance(&p, &w) - 0.0).abs() <= 2.0 + 1e-12);
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn empty_intersection_and_dimension_mismatch() {
        let t = BoxTarget::new(2).unwrap();
        assert!(t
            .ball_intersection_witness(&[(vec![0.0, 0.0], 1.0), (vec![4.0, 0.0], 1.0)])
            .unwrap()
            .is_none());
        assert!(t
            .ball_intersection_witness(&[(vec![0.0], 1.0)])
            .is_err());
    }
}
